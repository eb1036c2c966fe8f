//! Lipschitz versus C¹ closeness for smooth maps.
//!
//! On the interval, `d_W` controls derivatives. On the disk it does not: a
//! rotation by an angle `γ(|p|)` that falls from `π` to `0` slowly in
//! `log r` is `d_W`-close to the identity while its differential at the
//! origin is `−I`.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{operator_norm, rotation, top_singular_direction, Mat2, Vec2};
use crate::map_metrics::{dist_c0, dist_w_prime, Pair};
use crate::maps::{Direction, IntervalDiffeo, MapSystem};
use crate::spaces::{sample_pairs, sample_rng, DiskPoint, MetricSpace, PairSample, UnitDisk, UnitInterval};
use crate::{Error, Result};

/// The rotation-angle profile: `π` on `[0, a]`, `0` on `[b, 1]`, and
/// `|rγ'(r)| ≤ ε` throughout.
///
/// In `s = log r` the slope `dγ/ds` is `−ε·w(s)`, where `w` is `1` on the
/// middle of `[log a, log b]` and rises and falls by cubic smoothstep over
/// log-width 1 centred at `log c` and `log d`. On the middle, `γ` is the
/// log curve `k − ε log r`, which vanishes at `d` and equals `π` at `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaProfile {
    pub epsilon: f64,
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// `∫₀ᵗ (3u² − 2u³) du`.
fn ramp_integral(t: f64) -> f64 {
    t * t * t * (1.0 - 0.5 * t)
}

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

/// Builds the profile with `k = ε·log(ε/2)`, so `d = ε/2` and `c = d·e^{−π/ε}`.
pub fn gamma_build(epsilon: f64) -> Result<GammaProfile> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let k = epsilon * (epsilon / 2.0).ln();
    let d = (k / epsilon).exp();
    let c = ((k - PI) / epsilon).exp();
    Ok(GammaProfile { epsilon, k, a: c * (-0.5f64).exp(), b: d * 0.5f64.exp(), c, d })
}

impl GammaProfile {
    /// `log b − log r`, the log-distance below the outer plateau edge.
    fn depth(&self, r: f64) -> f64 {
        self.b.ln() - r.ln()
    }

    /// Total log-width `log b − log a`.
    fn span(&self) -> f64 {
        PI / self.epsilon + 1.0
    }

    pub fn gamma(&self, r: f64) -> f64 {
        if r <= self.a {
            return PI;
        }
        if r >= self.b {
            return 0.0;
        }
        let (u, l) = (self.depth(r), self.span());
        let w = if u <= 1.0 {
            ramp_integral(u)
        } else if u < l - 1.0 {
            u - 0.5
        } else {
            l - 1.0 - ramp_integral(l - u)
        };
        (self.epsilon * w).clamp(0.0, PI)
    }

    /// `r·γ'(r)`, which lies in `[−ε, 0]`.
    pub fn r_gamma_prime(&self, r: f64) -> f64 {
        if r <= self.a || r >= self.b {
            return 0.0;
        }
        let (u, l) = (self.depth(r), self.span());
        let w = if u <= 1.0 {
            smoothstep(u)
        } else if u < l - 1.0 {
            1.0
        } else {
            smoothstep(l - u)
        };
        -self.epsilon * w
    }

    pub fn gamma_prime(&self, r: f64) -> f64 {
        if r <= 0.0 {
            0.0
        } else {
            self.r_gamma_prime(r) / r
        }
    }
}

/// `r(cos(θ ± γ(r)), sin(θ ± γ(r)))`, the sign chosen by `direction`.
pub fn counterexample_apply(p: &DiskPoint, prof: &GammaProfile, direction: Direction) -> DiskPoint {
    let angle = prof.gamma(p.norm());
    let angle = match direction {
        Direction::Forward => angle,
        Direction::Inverse => -angle,
    };
    DiskPoint::from_vec(rotation(angle) * p.to_vec())
}

/// The counterexample diffeomorphism as a map system.
pub fn counterexample_system(prof: &GammaProfile) -> MapSystem<DiskPoint> {
    let (f, g) = (*prof, *prof);
    MapSystem::exact(
        format!("gamma-rot:{}", prof.epsilon),
        move |p: &DiskPoint| counterexample_apply(p, &f, Direction::Forward),
        move |p: &DiskPoint| counterexample_apply(p, &g, Direction::Inverse),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JacobianSample {
    pub p: DiskPoint,
    #[serde(skip)]
    pub d_pf: Mat2,
    pub gamma: f64,
    /// `‖d_pf‖`.
    pub norm: f64,
    /// `‖d_pf − R_γ‖`.
    pub deviation: f64,
}

/// `d_pf = R_γ + (γ'/r)·(R_{γ+π/2} p) pᵀ`; at the origin this is `R_π`.
pub fn jacobian(p: &DiskPoint, prof: &GammaProfile) -> JacobianSample {
    let r = p.norm();
    let gamma = prof.gamma(r);
    let rot = rotation(gamma);
    let d_pf = if r == 0.0 {
        rot
    } else {
        let v = p.to_vec();
        rot + (rotation(gamma + 0.5 * PI) * v) * v.transpose() * (prof.gamma_prime(r) / r)
    };
    JacobianSample { p: *p, d_pf, gamma, norm: operator_norm(&d_pf), deviation: operator_norm(&(d_pf - rot)) }
}

/// Pairs for probing the counterexample: half uniform on the disk, half with
/// `log r` uniform on `[log r_min, 0]` and separations from `10⁻⁴ r` to `2r`.
pub fn counterexample_pairs(count: usize, seed: u64, r_min: f64) -> Result<PairSample<DiskPoint>> {
    if !(r_min > 0.0 && r_min < 1.0) {
        return Err(Error::InvalidParameter(format!("r_min must lie in (0, 1), got {r_min}")));
    }
    let uniform = count / 2;
    let mut pairs = if uniform > 0 { sample_pairs(&UnitDisk, uniform, seed, None)? } else { PairSample::from_pairs(Vec::new()) };
    let mut rng = sample_rng(seed, 4);
    let lo = r_min.ln();
    let mut local = Vec::with_capacity(count - uniform);
    while local.len() < count - uniform {
        let r = (lo * rng.gen::<f64>()).exp();
        let p = DiskPoint::polar(r, 2.0 * PI * rng.gen::<f64>());
        let sep = r * 10f64.powf(-4.0 + 4.3 * rng.gen::<f64>());
        let q = DiskPoint::from_vec(p.to_vec() + rotation(2.0 * PI * rng.gen::<f64>()) * Vec2::new(sep, 0.0));
        if q.norm() <= 1.0 && q != p {
            local.push((p, q));
        }
    }
    pairs.extend(PairSample::from_pairs(local));
    Ok(pairs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub epsilon: f64,
    pub pairs: usize,
    /// `max |‖fq − fp‖ − ‖q − p‖| / ‖q − p‖`.
    pub max_deviation: f64,
    pub witness: Option<Pair<DiskPoint>>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_deviation ≤ ε`.
    pub deviation_holds: bool,
    /// Every ratio lies in `[1/(1+ε), 1+ε]`.
    pub ratios_hold: bool,
}

/// Measures `d'_W(f, id)` for the counterexample over `pairs`.
pub fn dw_prime_ratio_check(prof: &GammaProfile, pairs: &PairSample<DiskPoint>) -> Result<RatioReport> {
    if pairs.is_empty() {
        return Err(Error::EmptySample("ratio check pairs"));
    }
    let images = pairs.transport(|p| counterexample_apply(p, prof, Direction::Forward));
    let ratios: Vec<f64> = pairs
        .iter()
        .zip(images.iter())
        .enumerate()
        .map(|(i, ((p, q), (fp, fq)))| {
            let d = UnitDisk.distance(p, q);
            if d == 0.0 {
                return Err(Error::CoincidentPair { index: i });
            }
            Ok(UnitDisk.distance(fp, fq) / d)
        })
        .collect::<Result<_>>()?;
    let (mut worst, mut at) = (0.0f64, None);
    for (i, r) in ratios.iter().enumerate() {
        let dev = (r - 1.0).abs();
        if dev > worst {
            worst = dev;
            at = Some(i);
        }
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let eps = prof.epsilon;
    Ok(RatioReport {
        epsilon: eps,
        pairs: ratios.len(),
        max_deviation: worst,
        witness: at.map(|i| {
            let (x, y) = pairs.pair(i);
            Pair { x: *x, y: *y }
        }),
        min_ratio,
        max_ratio,
        deviation_holds: worst <= eps,
        ratios_hold: min_ratio >= 1.0 / (1.0 + eps) && max_ratio <= 1.0 + eps,
    })
}

/// `‖d_0f − I‖ = ‖R_π − I‖ = 2`.
pub fn c1_gap(prof: &GammaProfile) -> f64 {
    operator_norm(&(jacobian(&DiskPoint::ORIGIN, prof).d_pf - Mat2::identity()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JacobianLemmaReport {
    pub epsilon: f64,
    pub points: usize,
    /// `max ‖d_pf − R_γ(r)‖`.
    pub max_deviation: f64,
    pub max_norm: f64,
    pub holds: bool,
}

/// Checks `‖d_pf − R_γ(r)‖ ≤ ε` at `count` points, half uniform on the disk
/// and half log-uniform in radius over `[a/e, 1]`.
pub fn jacobian_lemma_check(prof: &GammaProfile, count: usize, seed: u64) -> Result<JacobianLemmaReport> {
    if count == 0 {
        return Err(Error::EmptySample("jacobian points"));
    }
    let mut pts = UnitDisk.sample_points(count / 2, seed);
    let mut rng = sample_rng(seed, 5);
    let lo = prof.a.ln() - 1.0;
    while pts.len() < count {
        pts.push(DiskPoint::polar((lo * rng.gen::<f64>()).exp(), 2.0 * PI * rng.gen::<f64>()));
    }
    let samples: Vec<JacobianSample> = pts.par_iter().map(|p| jacobian(p, prof)).collect();
    let max_deviation = samples.iter().map(|j| j.deviation).fold(0.0, f64::max);
    Ok(JacobianLemmaReport {
        epsilon: prof.epsilon,
        points: samples.len(),
        max_deviation,
        max_norm: samples.iter().map(|j| j.norm).fold(0.0, f64::max),
        holds: max_deviation <= prof.epsilon + JACOBIAN_ROUNDOFF,
    })
}

/// Rounding slack on the Jacobian deviation, which attains `ε` on the ramps.
pub const JACOBIAN_ROUNDOFF: f64 = 1e-12;

/// One row of the separation table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeparationRow {
    pub epsilon: f64,
    pub dw_prime_bound: f64,
    pub measured: f64,
    pub c1_gap: f64,
}

/// Measures `d'_W(f_ε, id)` and the C¹ gap for each `ε`, over one shared
/// pair sample reaching down to the smallest plateau radius.
pub fn separation_table(epsilons: &[f64], count: usize, seed: u64) -> Result<Vec<SeparationRow>> {
    let profiles = epsilons.iter().map(|&e| gamma_build(e)).collect::<Result<Vec<_>>>()?;
    let r_min = profiles.iter().map(|p| p.a).fold(1.0, f64::min) * (-2.0f64).exp();
    let pairs = counterexample_pairs(count, seed, r_min)?;
    profiles
        .iter()
        .map(|prof| {
            let r = dw_prime_ratio_check(prof, &pairs)?;
            Ok(SeparationRow { epsilon: prof.epsilon, dw_prime_bound: prof.epsilon, measured: r.max_deviation, c1_gap: c1_gap(prof) })
        })
        .collect()
}

/// `epsilon,dw_prime_bound,measured,c1_gap` rows with a header.
pub fn separation_csv(rows: &[SeparationRow]) -> String {
    let mut out = String::from("epsilon,dw_prime_bound,measured,c1_gap\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.epsilon, r.dw_prime_bound, r.measured, r.c1_gap));
    }
    out
}

/// Separations of the local pairs added at every grid point.
pub const LOCAL_STEPS: [f64; 3] = [1e-4, 1e-6, 1e-7];

/// Extra separations at `x = 0`, where floating point resolves them.
pub const ORIGIN_STEPS: [f64; 2] = [1e-9, 1e-12];

/// Slack for difference quotients at the local steps against exact derivatives.
pub const INTERVAL_MESH_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalReport {
    pub f: String,
    pub g: String,
    pub grid_n: usize,
    pub d_c0: f64,
    /// `sup |f' − g'|` over the grid.
    pub derivative_gap: f64,
    /// Measured `d'_W(f, g)` over all grid pairs plus local pairs.
    pub dw_prime: f64,
    pub mesh_tol: f64,
    /// `derivative_gap ≤ dw_prime + mesh_tol`.
    pub holds: bool,
}

/// Checks `sup |f' − g'| ≤ d'_W(f, g)` for increasing interval diffeomorphisms.
pub fn interval_dw_vs_c1(f: &IntervalDiffeo, g: &IntervalDiffeo, grid_n: usize) -> Result<IntervalReport> {
    if grid_n < 2 {
        return Err(Error::InvalidParameter(format!("grid needs at least 2 cells, got {grid_n}")));
    }
    f.check(grid_n)?;
    g.check(grid_n)?;
    let (fs, gs) = (f.system(), g.system());
    let grid: Vec<f64> = (0..=grid_n).map(|i| i as f64 / grid_n as f64).collect();
    let d_c0 = dist_c0(&UnitInterval, &fs, &gs, &grid)?.value;
    if !(d_c0 < 0.5) {
        return Err(Error::Precondition(format!("d_C0 = {d_c0} leaves the sign of the derivatives undetermined")));
    }
    let mut index = Vec::new();
    for i in 0..grid.len() {
        for k in i + 1..grid.len() {
            index.push([i as u32, k as u32]);
        }
    }
    let mut pairs = PairSample::from_indexed(grid.clone(), index)?;
    let mut local = Vec::new();
    for &x in &grid {
        for h in LOCAL_STEPS {
            local.push(if x + h <= 1.0 { (x, x + h) } else { (x - h, x) });
        }
    }
    local.extend(ORIGIN_STEPS.map(|h| (0.0, h)));
    pairs.extend(PairSample::from_pairs(local));
    let dw_prime = dist_w_prime(&UnitInterval, &fs, &gs, &pairs)?.value;
    let derivative_gap = grid.iter().map(|&x| (f.derivative(x) - g.derivative(x)).abs()).fold(0.0, f64::max);
    Ok(IntervalReport {
        f: f.to_string(),
        g: g.to_string(),
        grid_n,
        d_c0,
        derivative_gap,
        dw_prime,
        mesh_tol: INTERVAL_MESH_TOL,
        holds: derivative_gap <= dw_prime + INTERVAL_MESH_TOL,
    })
}

/// A domain sitting isometrically in the plane.
pub trait EuclideanDomain: MetricSpace {
    fn embed(&self, p: &Self::Point) -> Vec2;
    /// A point at distance `h` from `p` along `±v`, staying in the domain.
    fn nudge(&self, p: &Self::Point, v: Vec2, h: f64) -> Option<Self::Point>;
}

impl EuclideanDomain for UnitInterval {
    fn embed(&self, p: &f64) -> Vec2 {
        Vec2::new(*p, 0.0)
    }

    fn nudge(&self, p: &f64, v: Vec2, h: f64) -> Option<f64> {
        let s = v.x.signum() * h;
        if v.x == 0.0 {
            None
        } else if (0.0..=1.0).contains(&(p + s)) {
            Some(p + s)
        } else {
            Some(p - s).filter(|q| (0.0..=1.0).contains(q))
        }
    }
}

impl EuclideanDomain for UnitDisk {
    fn embed(&self, p: &DiskPoint) -> Vec2 {
        p.to_vec()
    }

    fn nudge(&self, p: &DiskPoint, v: Vec2, h: f64) -> Option<DiskPoint> {
        let v = v * (h / v.norm());
        [p.to_vec() + v, p.to_vec() - v].into_iter().map(DiskPoint::from_vec).find(|q| q.norm() <= 1.0)
    }
}

/// Jacobian evaluators for both maps and the points to probe them at.
pub struct JacobianProbe<'a, P> {
    pub jf: &'a (dyn Fn(&P) -> Mat2 + Sync),
    pub jg: &'a (dyn Fn(&P) -> Mat2 + Sync),
    pub points: &'a [P],
}

/// Relative step of the probe pairs; proportional to `|p|` so the probes
/// resolve structure at every scale.
pub const PROBE_STEP: f64 = 1e-7;

/// Slack for the probe inequality.
pub const PROBE_TOL: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dc1Report {
    pub f: String,
    pub g: String,
    pub d_c0: f64,
    /// Sampled `Lips(f − g)`.
    pub lips_diff: f64,
    /// `d_C0 + Lips(f − g)`.
    pub value: f64,
    /// `sup ‖d_pf − d_pg‖` over the probe points.
    pub jacobian_gap: Option<f64>,
    /// `jacobian_gap ≤ lips_diff + PROBE_TOL`.
    pub jacobian_bound_holds: Option<bool>,
}

/// `d_C0(f, g) + Lips(f − g)`, with `Lips` sampled over `pairs` and, when a
/// probe is given, over short pairs along the top singular direction of
/// `d_pf − d_pg` at every probe point.
pub fn dc1_metric<S>(
    space: &S,
    f: &MapSystem<S::Point>,
    g: &MapSystem<S::Point>,
    pairs: &PairSample<S::Point>,
    pts: &[S::Point],
    probe: Option<JacobianProbe<'_, S::Point>>,
) -> Result<Dc1Report>
where
    S: EuclideanDomain + Sync,
    S::Point: 'static,
{
    let d_c0 = dist_c0(space, f, g, pts)?.value;
    let mut all = pairs.clone();
    let mut gap = None;
    if let Some(pr) = &probe {
        let mut local = Vec::with_capacity(pr.points.len());
        let mut worst = 0.0f64;
        for p in pr.points {
            let diff = (pr.jf)(p) - (pr.jg)(p);
            worst = worst.max(operator_norm(&diff));
            let h = PROBE_STEP * space.embed(p).norm().max(f64::MIN_POSITIVE.sqrt());
            if let Some(q) = space.nudge(p, top_singular_direction(&diff), h) {
                local.push((p.clone(), q));
            }
        }
        all.extend(PairSample::from_pairs(local));
        gap = Some(worst);
    }
    let diff = |p: &S::Point| -> Result<Vec2> { Ok(space.embed(&f.apply(p)?) - space.embed(&g.apply(p)?)) };
    let lips_diff = all
        .indices()
        .par_iter()
        .map(|&[i, k]| {
            let (p, q) = (&all.points()[i as usize], &all.points()[k as usize]);
            let d = (space.embed(p) - space.embed(q)).norm();
            if d == 0.0 {
                return Ok(0.0);
            }
            Ok((diff(p)? - diff(q)?).norm() / d)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Dc1Report {
        f: f.name().to_string(),
        g: g.name().to_string(),
        d_c0,
        lips_diff,
        value: d_c0 + lips_diff,
        jacobian_gap: gap,
        jacobian_bound_holds: gap.map(|j| j <= lips_diff + PROBE_TOL),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_constants() {
        let p = gamma_build(0.5).unwrap();
        assert!((p.d - 0.25).abs() < 1e-15);
        let c = 0.25 * (-2.0 * PI).exp();
        assert!((p.c - c).abs() < 1e-15 && (p.c - 4.67e-4).abs() < 1e-6);
        assert!(p.k < 0.0 && 0.0 < p.a && p.a < p.c && p.c < p.d && p.d < p.b && p.b < p.epsilon);
        assert_eq!(p.gamma(p.a / 2.0), PI);
        assert_eq!(p.gamma((p.b + 1.0) / 2.0), 0.0);
        assert!(gamma_build(1.0).is_err() && gamma_build(0.0).is_err());
    }

    #[test]
    fn profile_follows_the_log_curve_in_the_middle() {
        let p = gamma_build(0.2).unwrap();
        let mid = (p.c * p.d).sqrt();
        assert!((p.gamma(mid) - (p.k - p.epsilon * mid.ln())).abs() < 1e-12);
        assert!((p.r_gamma_prime(mid) + p.epsilon).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_difference_quotients() {
        let p = gamma_build(0.5).unwrap();
        for i in 1..200 {
            let r = p.a * (p.b / p.a).powf(i as f64 / 200.0);
            let h = 1e-6 * r;
            let fd = (p.gamma(r + h) - p.gamma(r - h)) / (2.0 * h);
            assert!((fd * r - p.r_gamma_prime(r)).abs() < 1e-6, "r={r}");
        }
    }

    #[test]
    fn plateaus_of_the_map() {
        let p = gamma_build(0.3).unwrap();
        let q = DiskPoint::polar(p.a * 0.5, 1.0);
        let fq = counterexample_apply(&q, &p, Direction::Forward);
        assert!((fq.x + q.x).abs() < 1e-18 && (fq.y + q.y).abs() < 1e-18);
        let o = DiskPoint::new(0.6, -0.3);
        assert_eq!(counterexample_apply(&o, &p, Direction::Forward), o);
        let j = jacobian(&DiskPoint::ORIGIN, &p);
        assert!((j.d_pf + Mat2::identity()).norm() < 1e-15);
        assert!((jacobian(&o, &p).d_pf - Mat2::identity()).norm() == 0.0);
        assert!((c1_gap(&p) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_undoes_forward() {
        let p = gamma_build(0.5).unwrap();
        let sys = counterexample_system(&p);
        for i in 0..100 {
            let q = DiskPoint::polar(p.b * i as f64 / 100.0, 0.1 * i as f64);
            let back = sys.apply_inverse(&sys.apply(&q).unwrap()).unwrap();
            assert!((back.to_vec() - q.to_vec()).norm() < 1e-15);
        }
    }

    #[test]
    fn ratio_check_on_plateau_pairs() {
        let p = gamma_build(0.5).unwrap();
        let outer = PairSample::from_pairs(vec![(DiskPoint::new(0.5, 0.0), DiskPoint::new(0.0, 0.7))]);
        let r = dw_prime_ratio_check(&p, &outer).unwrap();
        assert_eq!((r.min_ratio, r.max_ratio), (1.0, 1.0));
        let inner = PairSample::from_pairs(vec![(DiskPoint::new(p.a / 3.0, 0.0), DiskPoint::new(0.0, -p.a / 2.0))]);
        let r = dw_prime_ratio_check(&p, &inner).unwrap();
        assert!((r.max_ratio - 1.0).abs() < 1e-15 && (r.min_ratio - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interval_examples() {
        let id = IntervalDiffeo::Identity;
        let same = interval_dw_vs_c1(&id, &id, 50).unwrap();
        assert_eq!((same.derivative_gap, same.dw_prime), (0.0, 0.0));
        let r = interval_dw_vs_c1(&id, &IntervalDiffeo::Poly(0.1), 100).unwrap();
        assert!((r.derivative_gap - 0.1).abs() < 1e-15);
        assert!((r.dw_prime - 0.1).abs() < 1e-9 && r.holds, "{r:?}");
    }

    #[test]
    fn nudges_stay_inside() {
        assert_eq!(UnitInterval.nudge(&1.0, Vec2::new(1.0, 0.0), 0.1), Some(0.9));
        let q = UnitDisk.nudge(&DiskPoint::new(1.0, 0.0), Vec2::new(2.0, 0.0), 0.5).unwrap();
        assert!((q.x - 0.5).abs() < 1e-15);
    }
}
