use rayon::prelude::*;

use super::{sample_rng, MetricSpace};
use crate::{Error, Result};

/// Distinct point pairs stored as indices into a shared point list.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSample<P> {
    points: Vec<P>,
    index: Vec<[u32; 2]>,
}

impl<P> PairSample<P> {
    pub fn from_indexed(points: Vec<P>, index: Vec<[u32; 2]>) -> Result<Self> {
        if points.len() > u32::MAX as usize {
            return Err(Error::InvalidParameter("too many points for a pair sample".into()));
        }
        if let Some(bad) = index.iter().find(|[i, j]| *i as usize >= points.len() || *j as usize >= points.len()) {
            return Err(Error::InvalidParameter(format!("pair index {bad:?} out of range")));
        }
        Ok(Self { points, index })
    }

    pub fn from_pairs(pairs: Vec<(P, P)>) -> Self {
        let mut points = Vec::with_capacity(2 * pairs.len());
        let mut index = Vec::with_capacity(pairs.len());
        for (k, (p, q)) in pairs.into_iter().enumerate() {
            points.push(p);
            points.push(q);
            index.push([2 * k as u32, 2 * k as u32 + 1]);
        }
        Self { points, index }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn indices(&self) -> &[[u32; 2]] {
        &self.index
    }

    pub fn pair(&self, i: usize) -> (&P, &P) {
        let [a, b] = self.index[i];
        (&self.points[a as usize], &self.points[b as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, &P)> + '_ {
        self.index.iter().map(|&[a, b]| (&self.points[a as usize], &self.points[b as usize]))
    }

    /// The same index pattern over the images of the points.
    pub fn transport<Q: Send, F>(&self, f: F) -> PairSample<Q>
    where
        P: Sync,
        F: Fn(&P) -> Q + Sync + Send,
    {
        PairSample { points: self.points.par_iter().map(f).collect(), index: self.index.clone() }
    }

    /// Fallible [`transport`](Self::transport); the first failing point wins.
    pub fn try_transport<Q: Send, F>(&self, f: F) -> Result<PairSample<Q>>
    where
        P: Sync,
        F: Fn(&P) -> Result<Q> + Sync + Send,
    {
        let points = self.points.par_iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(PairSample { points, index: self.index.clone() })
    }

    pub fn retain<F: FnMut(&P, &P) -> bool>(&mut self, mut keep: F) {
        let points = &self.points;
        self.index.retain(|&[a, b]| keep(&points[a as usize], &points[b as usize]));
    }

    pub fn extend(&mut self, other: PairSample<P>) {
        let base = self.points.len() as u32;
        self.points.extend(other.points);
        self.index.extend(other.index.into_iter().map(|[a, b]| [a + base, b + base]));
    }
}

const MAX_ATTEMPTS: usize = 64;

/// `count` pairs of distinct points drawn from `space`, reproducible for a
/// fixed seed. With `max_sep` every pair lies within that distance.
pub fn sample_pairs<S: MetricSpace>(
    space: &S,
    count: usize,
    seed: u64,
    max_sep: Option<f64>,
) -> Result<PairSample<S::Point>> {
    if count == 0 {
        return Err(Error::InvalidParameter("pair count must be at least 1".into()));
    }
    if let Some(sep) = max_sep {
        if !(sep > 0.0) {
            return Err(Error::InvalidParameter(format!("max_sep must be positive, got {sep}")));
        }
    }
    let mut rng = sample_rng(seed, 1);
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let mut found = None;
        for _ in 0..MAX_ATTEMPTS {
            let p = space.random_point(&mut rng);
            let q = match max_sep {
                None => Some(space.random_point(&mut rng)),
                Some(sep) => space.random_near(&p, sep, &mut rng),
            };
            if let Some(q) = q {
                let d = space.distance(&p, &q);
                if d > 0.0 && max_sep.map_or(true, |sep| d <= sep) {
                    found = Some((p, q));
                    break;
                }
            }
        }
        match found {
            Some(pair) => pairs.push(pair),
            None => {
                return Err(Error::MaxSepUnsatisfiable {
                    max_sep: max_sep.unwrap_or(f64::INFINITY),
                    attempts: MAX_ATTEMPTS,
                })
            }
        }
    }
    Ok(PairSample::from_pairs(pairs))
}
