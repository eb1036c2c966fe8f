//! Hyperbolic metrics, their certificates, and robust expansiveness.
//!
//! A metric is hyperbolic for `f` with expansive constant `δ` and expanding
//! factor `λ > 1` when every pair at distance below `δ` is stretched by at
//! least `λ` under `f` or `f⁻¹`. Maps that are `d_W`-close to such an `f`
//! inherit the property with any factor `λ′ < λ − d_W`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{Mat2, Vec2};
use crate::map_metrics::{dist_c0, images, Pair};
use crate::maps::{Direction, MapSystem, ToralAutomorphism};
use crate::parallel::argmin;
use crate::spaces::{torus_delta, MetricSpace, PairSample, SampleRng, TorusPoint};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperbolicityCertificate<P> {
    pub delta: f64,
    /// Smallest stretch `max(d(f x, f y), d(f⁻¹ x, f⁻¹ y)) / d(x, y)` seen.
    pub lambda: f64,
    pub pairs_checked: usize,
    pub worst_pair: Pair<P>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum HyperbolicityCheck<P> {
    Certified(HyperbolicityCertificate<P>),
    /// A close pair stretched by at most 1.
    Counterexample { delta: f64, pair: Pair<P>, ratio: f64, pairs_checked: usize },
}

impl<P> HyperbolicityCheck<P> {
    pub fn certificate(&self) -> Option<&HyperbolicityCertificate<P>> {
        match self {
            Self::Certified(c) => Some(c),
            Self::Counterexample { .. } => None,
        }
    }
}

/// Smallest two-sided stretch over the pairs closer than `delta`, with the
/// pair that attains it and the number of such pairs.
fn min_stretch<S: MetricSpace>(
    space: &S,
    f: &MapSystem<S::Point>,
    pairs: &PairSample<S::Point>,
    delta: f64,
) -> Result<(f64, Pair<S::Point>, usize)>
where
    S::Point: 'static,
{
    let close: Vec<usize> = (0..pairs.len())
        .into_par_iter()
        .filter(|&k| {
            let (x, y) = pairs.pair(k);
            space.distance(x, y) < delta
        })
        .collect();
    let fwd = images(f, Direction::Forward, pairs.points())?;
    let inv = images(f, Direction::Inverse, pairs.points())?;
    let idx = pairs.indices();
    let ratios: Vec<f64> = close
        .par_iter()
        .map(|&k| {
            let (x, y) = pairs.pair(k);
            let d = space.distance(x, y);
            if d == 0.0 {
                return Err(Error::CoincidentPair { index: k });
            }
            let [a, b] = idx[k].map(|i| i as usize);
            Ok(space.distance(&fwd[a], &fwd[b]).max(space.distance(&inv[a], &inv[b])) / d)
        })
        .collect::<Result<_>>()?;
    let (ratio, j) = argmin(ratios.len(), |j| Ok(ratios[j]))?.ok_or(Error::EmptySample("no pair closer than delta"))?;
    let (x, y) = pairs.pair(close[j]);
    Ok((ratio, Pair { x: x.clone(), y: y.clone() }, close.len()))
}

/// Checks the hyperbolicity inequality on every pair with `0 < d(x, y) < delta`.
pub fn check_hyperbolic<S>(space: &S, f: &MapSystem<S::Point>, pairs: &PairSample<S::Point>, delta: f64) -> Result<HyperbolicityCheck<S::Point>>
where
    S: MetricSpace,
    S::Point: 'static,
{
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let (ratio, pair, pairs_checked) = min_stretch(space, f, pairs, delta)?;
    Ok(if ratio > 1.0 {
        HyperbolicityCheck::Certified(HyperbolicityCertificate { delta, lambda: ratio, pairs_checked, worst_pair: pair })
    } else {
        HyperbolicityCheck::Counterexample { delta, pair, ratio, pairs_checked }
    })
}

/// Sup norm of eigen-coordinates, minimized over integer lifts.
///
/// For a toral automorphism `A` the unstable coordinate is multiplied by
/// `λ_u` and the stable one by `λ_s`, so `A` is hyperbolic for this metric
/// at scales where the shortest lift is preserved.
#[derive(Clone, Debug)]
pub struct EigenSupMetric {
    a: ToralAutomorphism,
    to_eigen: Mat2,
}

const LIFT_RANGE: i32 = 3;

impl EigenSupMetric {
    pub fn new(a: &ToralAutomorphism) -> Self {
        Self { a: a.clone(), to_eigen: a.to_eigen() }
    }

    pub fn automorphism(&self) -> &ToralAutomorphism {
        &self.a
    }

    fn norm(&self, v: &Vec2) -> f64 {
        let e = self.to_eigen * v;
        e.x.abs().max(e.y.abs())
    }

    /// `(c_lo, c_hi)` with `c_lo·d_flat ≤ d ≤ c_hi·d_flat`.
    pub fn equivalence_constants(&self) -> (f64, f64) {
        let m = self.to_eigen;
        let c_hi = m.row(0).norm().max(m.row(1).norm());
        let (eu, es) = (self.a.unstable_direction(), self.a.stable_direction());
        let c_lo = 1.0 / (eu + es).norm().max((eu - es).norm());
        (c_lo, c_hi)
    }
}

impl MetricSpace for EigenSupMetric {
    type Point = TorusPoint;

    fn distance(&self, p: &TorusPoint, q: &TorusPoint) -> f64 {
        let base = torus_delta(p, q);
        let mut best = f64::INFINITY;
        for i in -LIFT_RANGE..=LIFT_RANGE {
            for j in -LIFT_RANGE..=LIFT_RANGE {
                best = best.min(self.norm(&(base + Vec2::new(f64::from(i), f64::from(j)))));
            }
        }
        best
    }

    fn diameter(&self) -> f64 {
        let m = self.to_eigen;
        0.5 * (m[(0, 0)].abs() + m[(0, 1)].abs()).max(m[(1, 0)].abs() + m[(1, 1)].abs())
    }

    fn random_point(&self, rng: &mut SampleRng) -> TorusPoint {
        TorusPoint::new(rng.gen(), rng.gen())
    }

    fn random_near(&self, p: &TorusPoint, radius: f64, rng: &mut SampleRng) -> Option<TorusPoint> {
        let r = radius.min(self.diameter());
        let u = r * (2.0 * rng.gen::<f64>() - 1.0);
        let s = r * (2.0 * rng.gen::<f64>() - 1.0);
        let v = self.a.unstable_direction() * u + self.a.stable_direction() * s;
        let q = p.translate(v);
        (self.distance(p, &q) <= radius).then_some(q)
    }
}

/// `Σ_{|n| ≤ N} d(fⁿ x, fⁿ y) / 2^|n|`.
pub fn adapted_series_metric<S>(space: &S, f: &MapSystem<S::Point>, x: &S::Point, y: &S::Point, n: usize) -> Result<f64>
where
    S: MetricSpace,
    S::Point: 'static,
{
    let mut sum = space.distance(x, y);
    for direction in [Direction::Forward, Direction::Inverse] {
        let (mut a, mut b) = (x.clone(), y.clone());
        let mut weight = 1.0;
        for _ in 0..n {
            a = f.eval(direction, &a)?;
            b = f.eval(direction, &b)?;
            weight *= 0.5;
            sum += weight * space.distance(&a, &b);
        }
    }
    Ok(sum)
}

/// `ε < λ − λ′` chosen as large as floating point allows while `λ − ε > λ′`
/// still holds after rounding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RobustnessMargin {
    pub lambda: f64,
    pub lambda_prime: f64,
    pub epsilon: f64,
}

pub fn robust_margin(lambda: f64, lambda_prime: f64) -> Result<RobustnessMargin> {
    if !(lambda_prime > 1.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda' must exceed 1, got {lambda_prime}")));
    }
    if lambda_prime >= lambda {
        return Err(Error::InvalidParameter(format!("lambda' = {lambda_prime} must be below lambda = {lambda}")));
    }
    // the largest ε for which λ − ε still rounds above λ′
    let mut epsilon = lambda - lambda_prime.next_up();
    for _ in 0..4 {
        if lambda - epsilon > lambda_prime {
            break;
        }
        epsilon = epsilon.next_down();
    }
    if !(epsilon > 0.0 && lambda - epsilon > lambda_prime) {
        return Err(Error::InvalidParameter(format!("no positive margin between {lambda} and {lambda_prime}")));
    }
    Ok(RobustnessMargin { lambda, lambda_prime, epsilon })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `d_W < ε` and every close pair expands by at least `λ′` under `g`.
    Verified,
    /// `d_W < ε` but some close pair expands by less than `λ′`.
    Violated,
    /// `d_W ≥ ε`: nothing is claimed.
    HypothesisNotMet,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateReport<P> {
    pub f: String,
    pub g: String,
    pub margin: RobustnessMargin,
    pub delta: f64,
    pub d_w: f64,
    pub hypothesis_met: bool,
    pub pairs_checked: usize,
    /// Smallest stretch of `g` over the close pairs.
    pub min_ratio: f64,
    pub worst_pair: Pair<P>,
    pub violations: usize,
    pub conclusion_holds: bool,
    pub verdict: Verdict,
}

/// Per-pair quantities of [`verify_certificate`] gathered in one pass.
#[derive(Default)]
struct Sweep {
    w_fwd: f64,
    w_inv: f64,
    close: usize,
    violations: usize,
    min_ratio: Option<(f64, usize)>,
    /// Smallest index of a coincident pair or NaN quotient.
    bad: Option<(usize, bool)>,
}

impl Sweep {
    fn merge(mut self, o: Sweep) -> Sweep {
        self.w_fwd = self.w_fwd.max(o.w_fwd);
        self.w_inv = self.w_inv.max(o.w_inv);
        self.close += o.close;
        self.violations += o.violations;
        self.min_ratio = match (self.min_ratio, o.min_ratio) {
            (Some(a), Some(b)) => Some(if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
            (a, b) => a.or(b),
        };
        self.bad = match (self.bad, o.bad) {
            (Some(a), Some(b)) => Some(if b.0 < a.0 { b } else { a }),
            (a, b) => a.or(b),
        };
        self
    }
}

/// `d_W′(f, g)`, `d_W′(f⁻¹, g⁻¹)` and the stretch of `g` on pairs closer
/// than `delta`, computing each base and image distance once.
fn sweep_pairs<S>(space: &S, f: &MapSystem<S::Point>, g: &MapSystem<S::Point>, pairs: &PairSample<S::Point>, delta: f64, lambda_prime: f64) -> Result<Sweep>
where
    S: MetricSpace,
    S::Point: 'static,
{
    let src = pairs.points();
    let [fw, gw, fi, gi] = [(f, Direction::Forward), (g, Direction::Forward), (f, Direction::Inverse), (g, Direction::Inverse)]
        .map(|(m, dir)| images(m, dir, src));
    let (fw, gw, fi, gi) = (fw?, gw?, fi?, gi?);
    let idx = pairs.indices();
    let sweep = (0..pairs.len())
        .into_par_iter()
        .fold(Sweep::default, |mut acc, k| {
            let [a, b] = idx[k].map(|i| i as usize);
            let d = space.distance(&src[a], &src[b]);
            if !(d > 0.0) {
                let bad = (k, d == 0.0);
                acc.bad = Some(acc.bad.map_or(bad, |o| if o.0 < k { o } else { bad }));
                return acc;
            }
            let dist = |img: &[S::Point]| space.distance(&img[a], &img[b]);
            let (dg, dgi) = (dist(&gw), dist(&gi));
            acc.w_fwd = acc.w_fwd.max((dist(&fw) - dg).abs() / d);
            acc.w_inv = acc.w_inv.max((dist(&fi) - dgi).abs() / d);
            if d < delta {
                let r = dg.max(dgi) / d;
                acc.close += 1;
                acc.violations += usize::from(r < lambda_prime);
                if acc.min_ratio.is_none_or(|(m, _)| r < m) {
                    acc.min_ratio = Some((r, k));
                }
            }
            acc
        })
        .reduce(Sweep::default, Sweep::merge);
    match sweep.bad {
        Some((index, true)) => Err(Error::CoincidentPair { index }),
        Some((index, false)) => Err(Error::InvalidParameter(format!("sample {index} evaluates to NaN"))),
        None => Ok(sweep),
    }
}

/// Measures `d_W(f, g)` on `pairs` and `pts`, then checks directly that `g`
/// stretches every pair closer than the certificate's `δ` by at least `λ′`.
pub fn verify_certificate<S>(
    space: &S,
    f: &MapSystem<S::Point>,
    g: &MapSystem<S::Point>,
    margin: &RobustnessMargin,
    cert: &HyperbolicityCertificate<S::Point>,
    pairs: &PairSample<S::Point>,
    pts: &[S::Point],
) -> Result<CertificateReport<S::Point>>
where
    S: MetricSpace,
    S::Point: 'static,
{
    if margin.lambda > cert.lambda {
        return Err(Error::InvalidParameter(format!(
            "margin uses lambda = {} above the certified {}",
            margin.lambda, cert.lambda
        )));
    }
    let c0 = dist_c0(space, f, g, pts)?;
    let sweep = sweep_pairs(space, f, g, pairs, cert.delta, margin.lambda_prime)?;
    let d_w = c0.value + sweep.w_fwd + sweep.w_inv;
    let (min_ratio, k) = sweep.min_ratio.ok_or(Error::EmptySample("no pair closer than delta"))?;
    let (x, y) = pairs.pair(k);
    let worst_pair = Pair { x: x.clone(), y: y.clone() };
    let (pairs_checked, violations) = (sweep.close, sweep.violations);
    let hypothesis_met = d_w < margin.epsilon;
    let conclusion_holds = violations == 0;
    let verdict = match (hypothesis_met, conclusion_holds) {
        (false, _) => Verdict::HypothesisNotMet,
        (true, true) => Verdict::Verified,
        (true, false) => Verdict::Violated,
    };
    Ok(CertificateReport {
        f: f.name().to_string(),
        g: g.name().to_string(),
        margin: *margin,
        delta: cert.delta,
        d_w,
        hypothesis_met,
        pairs_checked,
        min_ratio,
        worst_pair,
        violations,
        conclusion_holds,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{shift_system, walters_perturbation};
    use crate::spaces::{sample_pairs, torus_distance, FlatTorus, ShiftSpace, ShiftWord};

    #[test]
    fn shift_is_hyperbolic_with_factor_two() {
        let space = ShiftSpace::new(4, 2).unwrap();
        let pairs = space.exhaustive_pairs(0, 4).unwrap();
        let check = check_hyperbolic(&space, &shift_system(), &pairs, 0.5).unwrap();
        let cert = check.certificate().unwrap();
        assert_eq!(cert.lambda, 2.0);
        assert!(cert.pairs_checked > 0 && cert.pairs_checked < pairs.len());
    }

    #[test]
    fn identity_is_a_counterexample() {
        let space = ShiftSpace::new(3, 2).unwrap();
        let pairs = space.exhaustive_pairs(1, 3).unwrap();
        match check_hyperbolic(&space, &MapSystem::<ShiftWord>::identity(), &pairs, 0.5).unwrap() {
            HyperbolicityCheck::Counterexample { ratio, .. } => assert_eq!(ratio, 1.0),
            other => panic!("expected counterexample, got {other:?}"),
        }
        let far = space.exhaustive_pairs(0, 0).unwrap();
        assert!(matches!(check_hyperbolic(&space, &shift_system(), &far, 0.5), Err(Error::EmptySample(_))));
    }

    #[test]
    fn cat_map_is_hyperbolic_for_the_eigen_metric() {
        let a = ToralAutomorphism::cat();
        let metric = EigenSupMetric::new(&a);
        let pairs = sample_pairs(&metric, 20_000, 3, Some(0.05)).unwrap();
        let check = check_hyperbolic(&metric, &a.system(), &pairs, 0.1).unwrap();
        let lambda = check.certificate().unwrap().lambda;
        assert!(lambda >= a.lambda_u() - 1e-6, "{lambda}");
        let flat = check_hyperbolic(&FlatTorus, &a.system(), &sample_pairs(&FlatTorus, 2000, 3, Some(0.05)).unwrap(), 0.1).unwrap();
        assert!(flat.certificate().unwrap().lambda < lambda);
    }

    #[test]
    fn eigen_metric_scales_along_eigendirections() {
        let a = ToralAutomorphism::cat();
        let m = EigenSupMetric::new(&a);
        let p = TorusPoint::new(0.2, 0.7);
        let q = p.translate(0.01 * a.unstable_direction());
        let d = m.distance(&p, &q);
        assert!((d - 0.01).abs() < 1e-15);
        assert!((m.distance(&a.apply(&p), &a.apply(&q)) - a.lambda_u() * d).abs() < 1e-14);
        let r = p.translate(0.01 * a.stable_direction());
        assert!((m.distance(&a.apply(&p), &a.apply(&r)) - a.lambda_s() * 0.01).abs() < 1e-14);
    }

    #[test]
    fn eigen_metric_axioms_and_equivalence() {
        let m = EigenSupMetric::new(&ToralAutomorphism::cat());
        crate::spaces::axioms::check_sampled_triples(&m, 40, 5);
        let (lo, hi) = m.equivalence_constants();
        let pts = m.sample_points(2000, 6);
        for w in pts.chunks(2) {
            let (d, e) = (m.distance(&w[0], &w[1]), torus_distance(&w[0], &w[1]));
            assert!(lo * e <= d * (1.0 + 1e-12) && d <= hi * e * (1.0 + 1e-12));
            assert!(d <= m.diameter());
        }
        for i in 0..10 {
            for j in 0..10 {
                let p = TorusPoint::new(i as f64 / 10.0, j as f64 / 10.0);
                assert_eq!(m.distance(&p, &p), 0.0);
                let q = TorusPoint::new(j as f64 / 10.0, i as f64 / 10.0);
                assert_eq!(m.distance(&p, &q) == 0.0, p == q);
            }
        }
    }

    #[test]
    fn series_metric_examples() {
        let id = MapSystem::<TorusPoint>::identity();
        let (x, y) = (TorusPoint::new(0.1, 0.2), TorusPoint::new(0.3, 0.25));
        let d = torus_distance(&x, &y);
        for n in [0, 1, 5, 20] {
            let s = adapted_series_metric(&FlatTorus, &id, &x, &y, n).unwrap();
            assert!((s - d * (3.0 - 2f64.powi(1 - n as i32))).abs() < 1e-15);
        }
        let cat = ToralAutomorphism::cat().system();
        assert_eq!(adapted_series_metric(&FlatTorus, &cat, &x, &x, 10).unwrap(), 0.0);
        for (p, q) in sample_pairs(&FlatTorus, 200, 7, None).unwrap().iter() {
            for n in [1, 4, 10] {
                let lhs = adapted_series_metric(&FlatTorus, &cat, &cat.apply(p).unwrap(), &cat.apply(q).unwrap(), n).unwrap();
                let rhs = 2.0 * adapted_series_metric(&FlatTorus, &cat, p, q, n).unwrap() + FlatTorus.diameter() * 2f64.powi(1 - n as i32);
                assert!(lhs <= rhs + 1e-12);
            }
        }
    }

    #[test]
    fn margins() {
        let m = robust_margin(2.0, 1.5).unwrap();
        assert!(m.epsilon < 0.5 && m.epsilon > 0.5 - 1e-15);
        assert!(m.lambda - m.epsilon > m.lambda_prime);
        let m = robust_margin(2.618, 2.0).unwrap();
        assert!(m.epsilon < 0.618 && m.epsilon > 0.618 - 1e-12);
        let tiny = robust_margin(2.0, 2.0f64.next_down().next_down()).unwrap();
        assert!(tiny.epsilon > 0.0 && tiny.epsilon < 1e-15);
        assert!(robust_margin(1.5, 1.5).is_err());
        assert!(robust_margin(1.5, 2.0).is_err());
        assert!(robust_margin(2.0, 1.0).is_err());
    }

    #[test]
    fn walters_perturbations_keep_expanding() {
        let space = ShiftSpace::new(5, 2).unwrap();
        let pairs = space.exhaustive_pairs(0, 4).unwrap();
        let pts = space.all_words().unwrap();
        let sigma = shift_system();
        let cert = check_hyperbolic(&space, &sigma, &pairs, 0.5).unwrap().certificate().unwrap().clone();
        let margin = robust_margin(2.0, 1.5).unwrap();
        let same = verify_certificate(&space, &sigma, &sigma, &margin, &cert, &pairs, &pts).unwrap();
        assert_eq!(same.verdict, Verdict::Verified);
        assert_eq!(same.min_ratio, 2.0);
        let g = walters_perturbation(5, 2, 11, 3, 4).unwrap();
        let r = verify_certificate(&space, &sigma, &g, &margin, &cert, &pairs, &pts).unwrap();
        assert!(r.d_w < 0.4);
        assert_eq!((r.verdict, r.violations), (Verdict::Verified, 0));
        let far = walters_perturbation(5, 2, 11, 1, 1).unwrap();
        let r = verify_certificate(&space, &sigma, &far, &margin, &cert, &pairs, &pts).unwrap();
        assert!(!r.hypothesis_met);
        assert_eq!(r.verdict, Verdict::HypothesisNotMet);
    }
}
