//! Uniform, Walters and Lipschitz distances between bi-Lipschitz maps.
//!
//! Every supremum is a lower bound over an explicit sample and comes with
//! the point or pair that attains it. Images are evaluated once per sample
//! point and shared by all pairs that index it.

use rayon::prelude::*;
use serde::Serialize;

use crate::maps::{Direction, MapSystem};
use crate::parallel::{argmax, argmin};
use crate::spaces::{MetricSpace, PairSample};
use crate::{Error, Result};

/// A sampled supremum with its maximizer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sup<W> {
    pub value: f64,
    pub witness: W,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pair<P> {
    pub x: P,
    pub y: P,
}

type PointOf<S> = <S as MetricSpace>::Point;

pub(crate) fn images<P>(f: &MapSystem<P>, direction: Direction, pts: &[P]) -> Result<Vec<P>>
where
    P: Send + Sync + 'static,
{
    pts.par_iter().map(|p| f.eval(direction, p)).collect()
}

fn point_sup<P: Clone>(pts: &[P], value: impl Fn(usize) -> Result<f64> + Sync, what: &'static str) -> Result<Sup<P>> {
    let (value, i) = argmax(pts.len(), value)?.ok_or(Error::EmptySample(what))?;
    Ok(Sup { value, witness: pts[i].clone(), samples: pts.len() })
}

fn pair_sup<P: Clone>(pairs: &PairSample<P>, value: impl Fn(usize) -> Result<f64> + Sync) -> Result<Sup<Pair<P>>> {
    let (value, i) = argmax(pairs.len(), value)?.ok_or(Error::EmptySample("pair sample"))?;
    let (x, y) = pairs.pair(i);
    Ok(Sup { value, witness: Pair { x: x.clone(), y: y.clone() }, samples: pairs.len() })
}

/// Distance of the `k`-th pair, rejecting coincident points.
fn base_distance<S: MetricSpace>(space: &S, pairs: &PairSample<S::Point>, k: usize) -> Result<f64> {
    let (x, y) = pairs.pair(k);
    let d = space.distance(x, y);
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::CoincidentPair { index: k })
    }
}

fn image_distance<S: MetricSpace>(space: &S, imgs: &[S::Point], [a, b]: [u32; 2]) -> f64 {
    space.distance(&imgs[a as usize], &imgs[b as usize])
}

/// Both maxima of the uniform distance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct C0Distance<P> {
    /// `max d(f x, g x)`.
    pub forward: Sup<P>,
    /// `max d(f⁻¹ x, g⁻¹ x)`.
    pub inverse: Sup<P>,
    pub value: f64,
}

fn c0_from_images<S: MetricSpace>(
    space: &S,
    pts: &[S::Point],
    [f, g, fi, gi]: [&[S::Point]; 4],
) -> Result<C0Distance<S::Point>> {
    let forward = point_sup(pts, |i| Ok(space.distance(&f[i], &g[i])), "point list")?;
    let inverse = point_sup(pts, |i| Ok(space.distance(&fi[i], &gi[i])), "point list")?;
    let value = forward.value + inverse.value;
    Ok(C0Distance { forward, inverse, value })
}

/// `d_C0(f, g) = max d(f x, g x) + max d(f⁻¹ x, g⁻¹ x)` over `pts`.
pub fn dist_c0<S>(space: &S, f: &MapSystem<PointOf<S>>, g: &MapSystem<PointOf<S>>, pts: &[PointOf<S>]) -> Result<C0Distance<PointOf<S>>>
where
    S: MetricSpace,
    S::Point: 'static,
{
    if pts.is_empty() {
        return Err(Error::EmptySample("point list"));
    }
    let f_img = images(f, Direction::Forward, pts)?;
    let g_img = images(g, Direction::Forward, pts)?;
    let fi_img = images(f, Direction::Inverse, pts)?;
    let gi_img = images(g, Direction::Inverse, pts)?;
    c0_from_images(space, pts, [&f_img, &g_img, &fi_img, &gi_img])
}

fn w_prime_from_images<S: MetricSpace>(
    space: &S,
    pairs: &PairSample<S::Point>,
    f_img: &[S::Point],
    g_img: &[S::Point],
) -> Result<Sup<Pair<S::Point>>> {
    let idx = pairs.indices();
    pair_sup(pairs, |k| {
        let d = base_distance(space, pairs, k)?;
        Ok((image_distance(space, f_img, idx[k]) - image_distance(space, g_img, idx[k])).abs() / d)
    })
}

fn l_prime_from_images<S: MetricSpace>(
    space: &S,
    pairs: &PairSample<S::Point>,
    (f_name, f_img): (&str, &[S::Point]),
    (g_name, g_img): (&str, &[S::Point]),
) -> Result<Sup<Pair<S::Point>>> {
    let idx = pairs.indices();
    pair_sup(pairs, |k| {
        base_distance(space, pairs, k)?;
        let df = image_distance(space, f_img, idx[k]);
        let dg = image_distance(space, g_img, idx[k]);
        if df == 0.0 {
            return Err(Error::CollapsedImage { index: k, map: f_name.to_string() });
        }
        if dg == 0.0 {
            return Err(Error::CollapsedImage { index: k, map: g_name.to_string() });
        }
        Ok((df / dg).ln().abs())
    })
}

/// `sup |d(f x, f y) − d(g x, g y)| / d(x, y)` over the pairs.
pub fn dist_w_prime<S>(
    space: &S,
    f: &MapSystem<PointOf<S>>,
    g: &MapSystem<PointOf<S>>,
    pairs: &PairSample<PointOf<S>>,
) -> Result<Sup<Pair<PointOf<S>>>>
where
    S: MetricSpace,
    S::Point: 'static,
{
    let f_img = images(f, Direction::Forward, pairs.points())?;
    let g_img = images(g, Direction::Forward, pairs.points())?;
    w_prime_from_images(space, pairs, &f_img, &g_img)
}

/// `sup |log(d(f x, f y) / d(g x, g y))|` over the pairs.
pub fn dist_l_prime<S>(
    space: &S,
    f: &MapSystem<PointOf<S>>,
    g: &MapSystem<PointOf<S>>,
    pairs: &PairSample<PointOf<S>>,
) -> Result<Sup<Pair<PointOf<S>>>>
where
    S: MetricSpace,
    S::Point: 'static,
{
    let f_img = images(f, Direction::Forward, pairs.points())?;
    let g_img = images(g, Direction::Forward, pairs.points())?;
    l_prime_from_images(space, pairs, (f.name(), &f_img), (g.name(), &g_img))
}

/// `sup d(f x, f y) / d(x, y)` over the pairs, a lower bound for `Lips(f)`.
pub fn lips_estimate<S>(space: &S, f: &MapSystem<PointOf<S>>, pairs: &PairSample<PointOf<S>>) -> Result<Sup<Pair<PointOf<S>>>>
where
    S: MetricSpace,
    S::Point: 'static,
{
    let f_img = images(f, Direction::Forward, pairs.points())?;
    let idx = pairs.indices();
    pair_sup(pairs, |k| Ok(image_distance(space, &f_img, idx[k]) / base_distance(space, pairs, k)?))
}

/// The uniform part together with both primed terms of `d_W` and `d_L`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapMetricReport<P> {
    pub f: String,
    pub g: String,
    pub points: usize,
    pub pairs: usize,
    pub d_c0: C0Distance<P>,
    pub d_w_prime_fwd: Sup<Pair<P>>,
    pub d_w_prime_inv: Sup<Pair<P>>,
    pub d_w: f64,
    pub d_l_prime_fwd: Sup<Pair<P>>,
    pub d_l_prime_inv: Sup<Pair<P>>,
    pub d_l: f64,
}

struct Images<P> {
    pts: [Vec<P>; 4],
    pairs: [Vec<P>; 4],
}

fn all_images<P: Send + Sync + 'static>(f: &MapSystem<P>, g: &MapSystem<P>, pairs: &PairSample<P>, pts: &[P]) -> Result<Images<P>> {
    let eval = |src: &[P]| -> Result<[Vec<P>; 4]> {
        Ok([
            images(f, Direction::Forward, src)?,
            images(g, Direction::Forward, src)?,
            images(f, Direction::Inverse, src)?,
            images(g, Direction::Inverse, src)?,
        ])
    };
    Ok(Images { pts: eval(pts)?, pairs: eval(pairs.points())? })
}

/// The full comparison of `f` and `g` on one point list and one pair sample.
pub fn metric_report<S>(
    space: &S,
    f: &MapSystem<PointOf<S>>,
    g: &MapSystem<PointOf<S>>,
    pairs: &PairSample<PointOf<S>>,
    pts: &[PointOf<S>],
) -> Result<MapMetricReport<PointOf<S>>>
where
    S: MetricSpace,
    S::Point: 'static,
{
    if pts.is_empty() {
        return Err(Error::EmptySample("point list"));
    }
    let im = all_images(f, g, pairs, pts)?;
    let [p0, p1, p2, p3] = &im.pts;
    let d_c0 = c0_from_images(space, pts, [p0, p1, p2, p3])?;
    let [f_img, g_img, fi_img, gi_img] = &im.pairs;
    let d_w_prime_fwd = w_prime_from_images(space, pairs, f_img, g_img)?;
    let d_w_prime_inv = w_prime_from_images(space, pairs, fi_img, gi_img)?;
    let fi_name = format!("{}^-1", f.name());
    let gi_name = format!("{}^-1", g.name());
    let d_l_prime_fwd = l_prime_from_images(space, pairs, (f.name(), f_img), (g.name(), g_img))?;
    let d_l_prime_inv = l_prime_from_images(space, pairs, (&fi_name, fi_img), (&gi_name, gi_img))?;
    Ok(MapMetricReport {
        f: f.name().to_string(),
        g: g.name().to_string(),
        points: pts.len(),
        pairs: pairs.len(),
        d_w: d_c0.value + d_w_prime_fwd.value + d_w_prime_inv.value,
        d_l: d_c0.value + d_l_prime_fwd.value + d_l_prime_inv.value,
        d_c0,
        d_w_prime_fwd,
        d_w_prime_inv,
        d_l_prime_fwd,
        d_l_prime_inv,
    })
}

/// `d_W(f, g) = d_C0 + d_W′(f, g) + d_W′(f⁻¹, g⁻¹)`.
pub fn dist_w<S>(
    space: &S,
    f: &MapSystem<PointOf<S>>,
    g: &MapSystem<PointOf<S>>,
    pairs: &PairSample<PointOf<S>>,
    pts: &[PointOf<S>],
) -> Result<f64>
where
    S: MetricSpace,
    S::Point: 'static,
{
    let c0 = dist_c0(space, f, g, pts)?;
    let fwd = dist_w_prime(space, f, g, pairs)?;
    let inv = dist_w_prime(space, &f.inverse(), &g.inverse(), pairs)?;
    Ok(c0.value + fwd.value + inv.value)
}

/// `d_L(f, g) = d_C0 + d_L′(f, g) + d_L′(f⁻¹, g⁻¹)`.
pub fn dist_l<S>(
    space: &S,
    f: &MapSystem<PointOf<S>>,
    g: &MapSystem<PointOf<S>>,
    pairs: &PairSample<PointOf<S>>,
    pts: &[PointOf<S>],
) -> Result<f64>
where
    S: MetricSpace,
    S::Point: 'static,
{
    let c0 = dist_c0(space, f, g, pts)?;
    let fwd = dist_l_prime(space, f, g, pairs)?;
    let inv = dist_l_prime(space, &f.inverse(), &g.inverse(), pairs)?;
    Ok(c0.value + fwd.value + inv.value)
}

/// `‖h‖_L = ‖h‖_C0 + max(log Lips h, log Lips h⁻¹)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LipschitzNorm {
    pub c0_norm: f64,
    pub loglips_fwd: f64,
    pub loglips_inv: f64,
    pub norm_l: f64,
}

impl LipschitzNorm {
    /// `Lips ≥ 1` holds for every bijection of a compact space, so sampled
    /// logarithms are clamped at zero.
    pub fn from_parts(c0_norm: f64, lips_fwd: f64, lips_inv: f64) -> Self {
        let loglips_fwd = lips_fwd.ln().max(0.0);
        let loglips_inv = lips_inv.ln().max(0.0);
        Self { c0_norm, loglips_fwd, loglips_inv, norm_l: c0_norm + loglips_fwd.max(loglips_inv) }
    }

    /// Plain estimator: `‖h‖_C0` over `c0_points`, `Lips h` over `fwd_pairs`
    /// and `Lips h⁻¹` over `inv_pairs`.
    pub fn from_samples<S>(
        space: &S,
        h: &MapSystem<PointOf<S>>,
        c0_points: &[PointOf<S>],
        fwd_pairs: &PairSample<PointOf<S>>,
        inv_pairs: &PairSample<PointOf<S>>,
    ) -> Result<Self>
    where
        S: MetricSpace,
        S::Point: 'static,
    {
        let h_img = images(h, Direction::Forward, c0_points)?;
        let c0 = point_sup(c0_points, |i| Ok(space.distance(&c0_points[i], &h_img[i])), "point list")?;
        let fwd = lips_estimate(space, h, fwd_pairs)?;
        let inv = lips_estimate(space, &h.inverse(), inv_pairs)?;
        Ok(Self::from_parts(c0.value, fwd.value, inv.value))
    }
}

/// `‖f‖_L` estimated symmetrically so that `‖f‖_L = ‖f⁻¹‖_L` on every sample.
///
/// The uniform part is `max(d(x, f x), d(x, f⁻¹ x))` over `pts`; the forward
/// Lipschitz bound combines `d(f x, f y)/d(x, y)` with `d(x, y)/d(f⁻¹ x, f⁻¹ y)`
/// over the pairs, and the inverse bound mirrors it.
pub fn norm_l<S>(space: &S, f: &MapSystem<PointOf<S>>, pairs: &PairSample<PointOf<S>>, pts: &[PointOf<S>]) -> Result<LipschitzNorm>
where
    S: MetricSpace,
    S::Point: 'static,
{
    let fp = images(f, Direction::Forward, pts)?;
    let fip = images(f, Direction::Inverse, pts)?;
    let c0 = point_sup(pts, |i| Ok(space.distance(&pts[i], &fp[i]).max(space.distance(&pts[i], &fip[i]))), "point list")?;
    let f_img = images(f, Direction::Forward, pairs.points())?;
    let fi_img = images(f, Direction::Inverse, pairs.points())?;
    let idx = pairs.indices();
    let expand = |img: &[S::Point], k: usize| -> Result<f64> {
        let d = base_distance(space, pairs, k)?;
        Ok(image_distance(space, img, idx[k]) / d)
    };
    let contract = |img: &[S::Point], name: &str, k: usize| -> Result<f64> {
        let d = base_distance(space, pairs, k)?;
        let e = image_distance(space, img, idx[k]);
        if e == 0.0 {
            return Err(Error::CollapsedImage { index: k, map: name.to_string() });
        }
        Ok(d / e)
    };
    let inv_name = format!("{}^-1", f.name());
    let fwd = pair_sup(pairs, |k| Ok(expand(&f_img, k)?.max(contract(&fi_img, &inv_name, k)?)))?;
    let inv = pair_sup(pairs, |k| Ok(expand(&fi_img, k)?.max(contract(&f_img, f.name(), k)?)))?;
    Ok(LipschitzNorm::from_parts(c0.value, fwd.value, inv.value))
}

/// The two norms of the operational metric `‖f g⁻¹‖_L + ‖g⁻¹ f‖_L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormInducedDistance {
    pub f_g_inv: LipschitzNorm,
    pub g_inv_f: LipschitzNorm,
    pub value: f64,
}

/// `‖f g⁻¹‖_L + ‖g⁻¹ f‖_L` from composed evaluators.
///
/// Samples are transported so that the estimate matches [`dist_l`] on the
/// base samples: `‖f g⁻¹‖` uses the points `g(X)`, the forward pairs `g(P)`
/// and the inverse pairs `f(P)`; `‖g⁻¹ f‖` uses `f⁻¹(X)`, `f⁻¹(P)` and `g⁻¹(P)`.
pub fn norm_induced_dist<S>(
    space: &S,
    f: &MapSystem<PointOf<S>>,
    g: &MapSystem<PointOf<S>>,
    pairs: &PairSample<PointOf<S>>,
    pts: &[PointOf<S>],
) -> Result<NormInducedDistance>
where
    S: MetricSpace,
    S::Point: 'static,
{
    if pts.is_empty() {
        return Err(Error::EmptySample("point list"));
    }
    let fg_inv = f.compose(&g.inverse());
    let g_inv_f = g.inverse().compose(f);
    let moved = |h: &MapSystem<PointOf<S>>, dir| -> Result<(Vec<PointOf<S>>, PairSample<PointOf<S>>)> {
        Ok((images(h, dir, pts)?, pairs.try_transport(|p| h.eval(dir, p))?))
    };
    let (g_pts, g_pairs) = moved(g, Direction::Forward)?;
    let (fi_pts, fi_pairs) = moved(f, Direction::Inverse)?;
    let f_pairs = pairs.try_transport(|p| f.apply(p))?;
    let gi_pairs = pairs.try_transport(|p| g.apply_inverse(p))?;
    let a = LipschitzNorm::from_samples(space, &fg_inv, &g_pts, &g_pairs, &f_pairs)?;
    let b = LipschitzNorm::from_samples(space, &g_inv_f, &fi_pts, &fi_pairs, &gi_pairs)?;
    Ok(NormInducedDistance { f_g_inv: a, g_inv_f: b, value: a.norm_l + b.norm_l })
}

/// Constants for the comparison `d_W(f, g) < δ ⇒ d_L(f, g) ≤ k·d_W(f, g)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EquivalenceConstant {
    /// Smallest sampled difference quotient of `f` or `f⁻¹`.
    pub delta0: f64,
    /// Largest sampled difference quotient of `f` or `f⁻¹`.
    pub delta1: f64,
    pub delta: f64,
    /// Lipschitz constant of `log` on `[δ₀ − δ, δ₁ + δ]`, i.e. `1/(δ₀ − δ)`.
    pub k: f64,
}

/// Difference quotients of `f` and `f⁻¹` on the pairs lie in `[δ₀, δ₁]`; if
/// `d_W′ < δ` the quotients of `g` lie in `[δ₀ − δ, δ₁ + δ]`, where `log` is
/// `k`-Lipschitz, so each `d_L′` term is at most `k` times its `d_W′` term.
pub fn equivalence_constant<S>(space: &S, f: &MapSystem<PointOf<S>>, pairs: &PairSample<PointOf<S>>, delta: f64) -> Result<EquivalenceConstant>
where
    S: MetricSpace,
    S::Point: 'static,
{
    let f_img = images(f, Direction::Forward, pairs.points())?;
    let fi_img = images(f, Direction::Inverse, pairs.points())?;
    let idx = pairs.indices();
    let quotient = |img: &[S::Point], k: usize| -> Result<f64> { Ok(image_distance(space, img, idx[k]) / base_distance(space, pairs, k)?) };
    let empty = || Error::EmptySample("pair sample");
    let lo_f = argmin(pairs.len(), |k| quotient(&f_img, k))?.ok_or_else(empty)?.0;
    let lo_i = argmin(pairs.len(), |k| quotient(&fi_img, k))?.ok_or_else(empty)?.0;
    let hi_f = argmax(pairs.len(), |k| quotient(&f_img, k))?.ok_or_else(empty)?.0;
    let hi_i = argmax(pairs.len(), |k| quotient(&fi_img, k))?.ok_or_else(empty)?.0;
    let delta0 = lo_f.min(lo_i).min(1.0 / hi_f).min(1.0 / hi_i);
    let delta1 = hi_f.max(hi_i).max(1.0 / lo_f).max(1.0 / lo_i);
    if !(delta > 0.0 && delta < delta0) {
        return Err(Error::InvalidParameter(format!("delta {delta} must lie in (0, {delta0})")));
    }
    Ok(EquivalenceConstant { delta0, delta1, delta, k: 1.0 / (delta0 - delta) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vec2;
    use crate::maps::{interval_scaling, perturb_torus, torus_rotation, Perturbation, ToralAutomorphism};
    use crate::spaces::{sample_pairs, torus_distance, FlatTorus, TorusPoint, UnitInterval};

    fn torus_samples(n: usize, seed: u64) -> (PairSample<TorusPoint>, Vec<TorusPoint>) {
        (sample_pairs(&FlatTorus, n, seed, None).unwrap(), FlatTorus.sample_points(n, seed))
    }

    fn bump() -> MapSystem<TorusPoint> {
        let b = Perturbation::Bump { center: TorusPoint::new(0.3, 0.3), radius: 0.1, amp: 0.002, angle: 0.0 };
        perturb_torus(&ToralAutomorphism::cat(), b).unwrap()
    }

    #[test]
    fn c0_examples() {
        let (_, pts) = torus_samples(500, 1);
        let id = MapSystem::identity();
        let rot = torus_rotation(Vec2::new(0.1, 0.0));
        assert!((dist_c0(&FlatTorus, &rot, &id, &pts).unwrap().value - 0.2).abs() < 1e-12);
        assert_eq!(dist_c0(&FlatTorus, &rot, &rot, &pts).unwrap().value, 0.0);

        let cat = ToralAutomorphism::cat();
        let c = Vec2::new(0.01, 0.0);
        let affine = perturb_torus(&cat, Perturbation::Affine { c }).unwrap();
        let d = dist_c0(&FlatTorus, &cat.system(), &affine, &pts).unwrap();
        let o = TorusPoint::new(0.0, 0.0);
        let expected = 0.01 + torus_distance(&o, &TorusPoint::from_vec(cat.apply_inverse_vec(&c)));
        assert!((d.value - expected).abs() < 1e-12);
        assert!((expected - 0.01 - 0.0002f64.sqrt()).abs() < 1e-15);
        assert!(dist_c0(&FlatTorus, &rot, &id, &[]).is_err());
    }

    #[test]
    fn isometric_composition_has_zero_primed_terms() {
        let (pairs, pts) = torus_samples(2000, 2);
        let g = bump();
        let f = torus_rotation(Vec2::new(0.37, 0.11)).compose(&g);
        assert!(dist_w_prime(&FlatTorus, &f, &g, &pairs).unwrap().value < 1e-13);
        assert!(dist_l_prime(&FlatTorus, &f, &g, &pairs).unwrap().value < 1e-12);
        let id = MapSystem::identity();
        let rot = torus_rotation(Vec2::new(0.1, 0.0));
        assert!((dist_w(&FlatTorus, &rot, &id, &pairs, &pts).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn interval_scaling_examples() {
        let pairs = sample_pairs(&UnitInterval, 500, 3, None).unwrap();
        let id = MapSystem::<f64>::identity();
        let half = interval_scaling(0.5).unwrap();
        let w = dist_w_prime(&UnitInterval, &id, &half, &pairs).unwrap();
        assert!((w.value - 0.5).abs() < 1e-12);
        let l = dist_l_prime(&UnitInterval, &id, &half, &pairs).unwrap();
        assert!((l.value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn bump_walters_distance_is_small() {
        let pairs = sample_pairs(&FlatTorus, 20000, 4, Some(0.05)).unwrap();
        let w = dist_w_prime(&FlatTorus, &ToralAutomorphism::cat().system(), &bump(), &pairs).unwrap();
        assert!(w.value > 0.0 && w.value <= 0.04, "{}", w.value);
        let (x, y) = (&w.witness.x, &w.witness.y);
        assert!(pairs.iter().any(|(p, q)| p == x && q == y));
    }

    #[test]
    fn lips_examples() {
        let pairs = sample_pairs(&FlatTorus, 50_000, 5, Some(1e-3)).unwrap();
        let id = MapSystem::identity();
        assert_eq!(lips_estimate(&FlatTorus, &id, &pairs).unwrap().value, 1.0);
        let rot = torus_rotation(Vec2::new(0.25, 0.5));
        assert!((lips_estimate(&FlatTorus, &rot, &pairs).unwrap().value - 1.0).abs() < 1e-9);
        let cat = ToralAutomorphism::cat().system();
        let l = lips_estimate(&FlatTorus, &cat, &pairs).unwrap().value;
        let lambda = (3.0 + 5f64.sqrt()) / 2.0;
        assert!(l >= 2.61 && l <= lambda + 1e-6, "{l}");
    }

    #[test]
    fn norm_examples() {
        let pairs = sample_pairs(&FlatTorus, 50_000, 6, Some(1e-3)).unwrap();
        let pts = FlatTorus.sample_points(1000, 6);
        let id = MapSystem::identity();
        assert_eq!(norm_l(&FlatTorus, &id, &pairs, &pts).unwrap().norm_l, 0.0);
        let rot = norm_l(&FlatTorus, &torus_rotation(Vec2::new(0.1, 0.0)), &pairs, &pts).unwrap();
        assert!((rot.c0_norm - 0.1).abs() < 1e-12 && rot.loglips_fwd < 1e-9 && (rot.norm_l - 0.1).abs() < 1e-9);
        let cat = ToralAutomorphism::cat().system();
        let n = norm_l(&FlatTorus, &cat, &pairs, &pts).unwrap();
        let target = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((n.loglips_fwd - target).abs() < 1e-3 && (n.loglips_inv - target).abs() < 1e-3);
        assert_eq!(n, norm_l(&FlatTorus, &cat.inverse(), &pairs, &pts).unwrap().swapped());
    }

    impl LipschitzNorm {
        fn swapped(self) -> Self {
            Self { loglips_fwd: self.loglips_inv, loglips_inv: self.loglips_fwd, ..self }
        }
    }

    #[test]
    fn operational_metric_matches_lipschitz_metric() {
        let (pairs, pts) = torus_samples(3000, 7);
        let cat = ToralAutomorphism::cat().system();
        let g = bump();
        let r = metric_report(&FlatTorus, &cat, &g, &pairs, &pts).unwrap();
        let n = norm_induced_dist(&FlatTorus, &cat, &g, &pairs, &pts).unwrap();
        assert!((n.value - r.d_l).abs() < 1e-9, "{} vs {}", n.value, r.d_l);
        let same = norm_induced_dist(&FlatTorus, &cat, &cat, &pairs, &pts).unwrap();
        assert!(same.value < 1e-9);
        let id = MapSystem::identity();
        let rot = norm_induced_dist(&FlatTorus, &torus_rotation(Vec2::new(0.1, 0.0)), &id, &pairs, &pts).unwrap();
        assert!((rot.value - 0.2).abs() < 1e-9);
    }

    #[test]
    fn report_components_add_up() {
        let (pairs, pts) = torus_samples(1000, 8);
        let cat = ToralAutomorphism::cat().system();
        let r = metric_report(&FlatTorus, &cat, &bump(), &pairs, &pts).unwrap();
        assert_eq!(r.d_w, r.d_c0.value + r.d_w_prime_fwd.value + r.d_w_prime_inv.value);
        assert_eq!(r.d_l, r.d_c0.value + r.d_l_prime_fwd.value + r.d_l_prime_inv.value);
        assert_eq!(r.d_w, dist_w(&FlatTorus, &cat, &bump(), &pairs, &pts).unwrap());
        assert_eq!(r.d_w, dist_w(&FlatTorus, &bump(), &cat, &pairs, &pts).unwrap());
        assert_eq!(r.d_l, dist_l(&FlatTorus, &cat, &bump(), &pairs, &pts).unwrap());
    }

    #[test]
    fn coincident_pairs_are_rejected() {
        let pairs = PairSample::from_pairs(vec![(0.2, 0.4), (0.3, 0.3)]);
        let id = MapSystem::<f64>::identity();
        let err = dist_w_prime(&UnitInterval, &id, &id, &pairs).unwrap_err();
        assert_eq!(err, Error::CoincidentPair { index: 1 });
        let collapse = MapSystem::<f64>::exact("zero", |_| 0.0, |_| 0.0);
        let ok = PairSample::from_pairs(vec![(0.2, 0.4)]);
        assert!(matches!(dist_l_prime(&UnitInterval, &id, &collapse, &ok), Err(Error::CollapsedImage { .. })));
    }

    #[test]
    fn equivalence_constant_bounds_the_lipschitz_metric() {
        let pairs = sample_pairs(&FlatTorus, 3000, 9, Some(0.05)).unwrap();
        let pts = FlatTorus.sample_points(500, 9);
        let cat = ToralAutomorphism::cat().system();
        let e = equivalence_constant(&FlatTorus, &cat, &pairs, 0.2).unwrap();
        assert!(e.delta0 <= 1.0 / 2.6 && e.delta1 >= 2.6);
        let r = metric_report(&FlatTorus, &cat, &bump(), &pairs, &pts).unwrap();
        assert!(r.d_w < e.delta, "{} {:?}", r.d_w, (r.d_c0.value, r.d_w_prime_fwd.value, r.d_w_prime_inv.value));
        assert!(r.d_l <= e.k * r.d_w);
        assert!(equivalence_constant(&FlatTorus, &cat, &pairs, 0.5).is_err());
    }
}
