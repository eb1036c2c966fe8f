//! Curves on flat cones and the Lipschitz rigidity of singular points.
//!
//! A regular point `x` sits inside a flat disk, so a circle of radius `r1`
//! around it has length `2πr1`. If some `j` sends `x` to the apex of an
//! `n`-prong cone, `j(C1)` winds around the apex at distance at least `r2`
//! and so has length at least `nπr2`. Comparing the two with the circle point
//! `z` closest to the apex after `j` gives `Lips(j)·Lips(j⁻¹) ≥ n/2`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::Vec2;
use crate::maps::MapSystem;
use crate::spaces::{cone_distance, sample_pairs, ConeDisk, ConePoint, PairSample};
use crate::{Error, Result};

/// `nπr`: the length of the circle of radius `r` around an `n`-prong apex.
pub fn circle_length(n: u32, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("cone needs n >= 2 prongs, got {n}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("circle radius must be positive, got {r}")));
    }
    Ok(f64::from(n) * PI * r)
}

/// An ordered polyline on a cone whose consecutive points should lie within `mesh`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveSample {
    pub points: Vec<ConePoint>,
    pub closed: bool,
    pub mesh: f64,
}

impl CurveSample {
    pub fn new(points: Vec<ConePoint>, closed: bool, mesh: f64) -> Self {
        Self { points, closed, mesh }
    }

    fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.points.len();
        let last = if self.closed && n > 1 { n } else { n.saturating_sub(1) };
        (0..last).map(move |i| (i, (i + 1) % n))
    }

    /// Inserts the geodesic midpoint of every segment.
    pub fn refine(&self, disk: &ConeDisk) -> Self {
        let mut points = Vec::with_capacity(2 * self.points.len());
        for (i, k) in self.segments() {
            points.push(self.points[i]);
            points.push(geodesic_midpoint(disk, &self.points[i], &self.points[k]));
        }
        if !self.closed {
            points.extend(self.points.last());
        }
        Self { points, closed: self.closed, mesh: self.mesh }
    }

    /// The image of every point under `j`, with a new mesh.
    pub fn map(&self, j: &MapSystem<ConePoint>, mesh: f64) -> Result<Self> {
        let points = self.points.par_iter().map(|p| j.apply(p)).collect::<Result<_>>()?;
        Ok(Self { points, closed: self.closed, mesh })
    }
}

/// Midpoint of the cone geodesic from `p` to `q`.
pub fn geodesic_midpoint(disk: &ConeDisk, p: &ConePoint, q: &ConePoint) -> ConePoint {
    let total = disk.total_angle();
    let diff = (q.theta - p.theta).rem_euclid(total);
    let (delta, sign) = if diff <= total - diff { (diff, 1.0) } else { (total - diff, -1.0) };
    if delta <= PI {
        let (u, v) = (0.5 * (p.r + q.r * delta.cos()), 0.5 * q.r * delta.sin());
        disk.point(u.hypot(v), p.theta + sign * v.atan2(u))
    } else if p.r >= q.r {
        disk.point(0.5 * (p.r - q.r), p.theta)
    } else {
        disk.point(0.5 * (q.r - p.r), q.theta)
    }
}

/// Polygonal length under the cone metric.
pub fn curve_length(disk: &ConeDisk, c: &CurveSample) -> Result<f64> {
    let mut total = 0.0;
    for (i, k) in c.segments() {
        let step = cone_distance(disk.n(), &c.points[i], &c.points[k]);
        if !(step <= c.mesh) {
            return Err(Error::MeshViolated { index: i, step, mesh: c.mesh });
        }
        total += step;
    }
    Ok(total)
}

/// `m` equally spaced points on the circle of radius `r` around `center`.
///
/// Around the apex the circle spans the full angle `nπ`; around a regular
/// point it is the flat circle, which requires `r < center.r`.
pub fn sample_circle(disk: &ConeDisk, center: &ConePoint, r: f64, m: usize) -> Result<CurveSample> {
    if m < 3 || !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("circle needs r > 0 and at least 3 points, got r={r}, m={m}")));
    }
    let (points, len) = if center.is_apex() {
        let step = disk.total_angle() / m as f64;
        ((0..m).map(|k| disk.point(r, k as f64 * step)).collect(), circle_length(disk.n(), r)?)
    } else {
        if r >= center.r {
            return Err(Error::Precondition(format!("circle of radius {r} around a point at distance {} reaches the apex", center.r)));
        }
        let step = 2.0 * PI / m as f64;
        let pts = (0..m).map(|k| {
            let t = k as f64 * step;
            disk.offset(center, r * t.cos(), r * t.sin())
        });
        (pts.collect(), 2.0 * PI * r)
    };
    let mesh = 1.01 * len / m as f64;
    Ok(CurveSample::new(points, true, mesh))
}

fn smoothstep_down(t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        1.0 - t * t * (3.0 - 2.0 * t)
    }
}

/// Sends the cone to the plane by `(r, θ) ↦ r·e^{2iθ/n}`.
fn to_plane(n: u32, p: &ConePoint) -> Vec2 {
    let a = 2.0 * p.theta / f64::from(n);
    Vec2::new(p.r * a.cos(), p.r * a.sin())
}

fn from_plane(disk: &ConeDisk, w: Vec2) -> ConePoint {
    let r = w.norm();
    if r == 0.0 {
        return ConePoint::APEX;
    }
    let a = w.y.atan2(w.x).rem_euclid(2.0 * PI);
    disk.point(r, a * f64::from(disk.n()) / 2.0)
}

/// Multiple of the target distance beyond which [`apex_mover`] is the identity.
pub const MOVER_SUPPORT: f64 = 4.0;

/// A homeomorphism of the cone disk sending the regular point `target` to the
/// apex: in the plane chart `r·e^{2iθ/n}` it translates by `−s(|z − z0|/R)·z0`,
/// where `s` falls from 1 to 0 by smoothstep and `R = 4·target.r`.
pub fn apex_mover(disk: &ConeDisk, target: &ConePoint) -> Result<MapSystem<ConePoint>> {
    if target.is_apex() {
        return Err(Error::Precondition("the target must be a regular point".into()));
    }
    let support = MOVER_SUPPORT * target.r;
    if target.r + support > disk.radius() {
        return Err(Error::Precondition(format!("mover support {} leaves the disk of radius {}", target.r + support, disk.radius())));
    }
    let (d, n) = (*disk, disk.n());
    let z0 = to_plane(n, target);
    let name = format!("apex-mover:{},{}", target.r, target.theta);
    let forward = move |p: &ConePoint| {
        let z = to_plane(n, p);
        let s = smoothstep_down((z - z0).norm() / support);
        Ok(if s == 0.0 { *p } else { from_plane(&d, z - z0 * s) })
    };
    let inverse = move |p: &ConePoint| {
        let w = to_plane(n, p);
        if smoothstep_down((w - z0).norm() / support) == 0.0 {
            return Ok(*p);
        }
        let mut z = w;
        for _ in 0..200 {
            let next = w + z0 * smoothstep_down((z - z0).norm() / support);
            let step = (next - z).norm();
            z = next;
            if step <= 1e-15 {
                return Ok(from_plane(&d, z));
            }
        }
        Err(Error::InverseDidNotConverge { map: "apex-mover".into(), last_step: f64::NAN })
    };
    Ok(MapSystem::new(name, forward, inverse))
}

/// Rotation of the cone about its apex by `alpha`, an isometry.
pub fn cone_rotation(disk: &ConeDisk, alpha: f64) -> MapSystem<ConePoint> {
    let (a, b) = (*disk, *disk);
    MapSystem::exact(
        format!("cone-rot:{alpha}"),
        move |p: &ConePoint| a.point(p.r, p.theta + alpha),
        move |p: &ConePoint| b.point(p.r, p.theta - alpha),
    )
}

/// Every quantity in the chain leading to `Lips(j)·Lips(j⁻¹) ≥ n/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidityReport {
    pub n: u32,
    pub x: ConePoint,
    pub r1: f64,
    /// `min d(apex, j(p))` over the sampled `C1`.
    pub r2: f64,
    /// The circle point realizing `r2`.
    pub z: ConePoint,
    pub length_c1: f64,
    pub length_j_c1: f64,
    /// Sampled over the given pairs, the segments of `C1` and `(x, z)`.
    pub lips_j: f64,
    pub lips_j_inv: f64,
    pub product: f64,
    pub threshold: f64,
    /// Slack allowed for chords of `j(C1)` cutting inside the circle of radius `r2`.
    pub mesh_tol: f64,
    /// `length(j(C1)) ≤ Lips(j)·2πr1`.
    pub length_upper_holds: bool,
    /// `length(j(C1)) ≥ nπr2 − mesh_tol`.
    pub isoperimetric_holds: bool,
    /// `Lips(j⁻¹) ≥ r1/r2`.
    pub inverse_ratio_holds: bool,
    /// `product ≥ n/2 − tol`, with `tol` covering `mesh_tol`.
    pub product_holds: bool,
}

/// Samples on `C1` used by [`rigidity_product`].
pub const CIRCLE_SAMPLES: usize = 4096;

/// Evaluates the rigidity chain for `j` moving the regular point `x` to the apex.
pub fn rigidity_product(disk: &ConeDisk, j: &MapSystem<ConePoint>, x: &ConePoint, r1: f64, pairs: &PairSample<ConePoint>) -> Result<RigidityReport> {
    let n = disk.n();
    if x.is_apex() {
        return Err(Error::Precondition("x must be a regular point".into()));
    }
    let jx = j.apply(x)?;
    if jx.r > 1e-12 {
        return Err(Error::Precondition(format!("j does not send x to the apex: |j(x)| = {}", jx.r)));
    }
    let c1 = sample_circle(disk, x, r1, CIRCLE_SAMPLES)?;
    let images = c1.map(j, f64::INFINITY)?;
    let separation = c1
        .points
        .par_iter()
        .map(|p| images.points.iter().map(|q| cone_distance(n, p, q)).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min);
    if !(separation > c1.mesh) {
        return Err(Error::Precondition(format!("C1 and j(C1) are not separated: gap {separation}")));
    }
    let (iz, r2) = images
        .points
        .iter()
        .enumerate()
        .map(|(i, q)| (i, q.r))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let z = c1.points[iz];
    let length_c1 = curve_length(disk, &c1)?;
    let image_mesh = images.segments().map(|(i, k)| cone_distance(n, &images.points[i], &images.points[k])).fold(0.0, f64::max);
    if !(image_mesh <= 0.1 * r2) {
        return Err(Error::MeshViolated { index: 0, step: image_mesh, mesh: 0.1 * r2 });
    }
    let length_j_c1 = curve_length(disk, &CurveSample { mesh: image_mesh, ..images.clone() })?;

    let mut ratios_fwd = 0.0f64;
    let mut ratios_inv = 0.0f64;
    let mut push = |p: &ConePoint, q: &ConePoint, jp: &ConePoint, jq: &ConePoint| -> Result<()> {
        let (d, e) = (cone_distance(n, p, q), cone_distance(n, jp, jq));
        if d > 0.0 {
            if e == 0.0 {
                return Err(Error::CollapsedImage { index: 0, map: j.name().to_string() });
            }
            ratios_fwd = ratios_fwd.max(e / d);
            ratios_inv = ratios_inv.max(d / e);
        }
        Ok(())
    };
    for (i, k) in c1.segments() {
        push(&c1.points[i], &c1.points[k], &images.points[i], &images.points[k])?;
    }
    push(x, &z, &jx, &images.points[iz])?;
    let pair_images = pairs.try_transport(|p| j.apply(p))?;
    for (a, b) in pairs.iter().zip(pair_images.iter()) {
        push(a.0, a.1, b.0, b.1)?;
    }

    let threshold = f64::from(n) / 2.0;
    let angular = image_mesh / r2;
    let mesh_tol = f64::from(n) * PI * r2 * angular * angular / 12.0;
    let product = ratios_fwd * ratios_inv;
    Ok(RigidityReport {
        n,
        x: *x,
        r1,
        r2,
        z,
        length_c1,
        length_j_c1,
        lips_j: ratios_fwd,
        lips_j_inv: ratios_inv,
        product,
        threshold,
        mesh_tol,
        length_upper_holds: length_j_c1 <= ratios_fwd * 2.0 * PI * r1,
        isoperimetric_holds: length_j_c1 >= f64::from(n) * PI * r2 - mesh_tol,
        inverse_ratio_holds: ratios_inv >= r1 / r2,
        product_holds: product >= threshold * (1.0 - mesh_tol / (f64::from(n) * PI * r2)) - 1e-12,
    })
}

/// Random pairs around the support of an apex mover, for Lipschitz estimates.
pub fn mover_pairs(disk: &ConeDisk, count: usize, seed: u64) -> Result<PairSample<ConePoint>> {
    sample_pairs(disk, count, seed, Some(0.05 * disk.radius()))
}

/// The rigidity chain for the apex mover aimed at `x`, with `r1 = x.r / 5`.
pub fn mover_report(disk: &ConeDisk, x: &ConePoint, pairs: &PairSample<ConePoint>) -> Result<RigidityReport> {
    let j = apex_mover(disk, x)?;
    rigidity_product(disk, &j, x, x.r / 5.0, pairs)
}

/// The contrapositive of the rigidity chain: maps with `Lips(j)·Lips(j⁻¹)`
/// below `threshold` cannot move a regular point to the apex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixSetCertificate {
    pub n: u32,
    /// `n/2`.
    pub threshold: f64,
    /// `ln(n/2)/2`: if `j` and `j⁻¹` both have log-Lipschitz constant below
    /// this, the product is below the threshold.
    pub loglips_radius: f64,
    /// True for `n = 2`, where regular points are movable by near-isometries.
    pub vacuous: bool,
    pub stress_maps: usize,
    pub stress_min_product: Option<f64>,
    pub tolerance: f64,
    /// Every stress map measured at least `threshold − tolerance`.
    pub separates: bool,
}

/// Size of the stress family: 10 distances times 5 angles.
pub const STRESS_FAMILY: usize = 50;

/// Targets of the stress family on a disk of radius 1.
pub fn stress_targets(disk: &ConeDisk) -> Vec<ConePoint> {
    let mut out = Vec::with_capacity(STRESS_FAMILY);
    for i in 0..10 {
        let t = 0.02 + 0.018 * i as f64;
        for k in 0..5 {
            out.push(disk.point(t, disk.total_angle() * (k as f64 + 0.1 * i as f64) / 5.0));
        }
    }
    out
}

/// Rigidity reports for every stress target on the unit `n`-prong disk,
/// sharing one random pair sample drawn from `seed`.
pub fn stress_family(n: u32, seed: u64) -> Result<Vec<RigidityReport>> {
    let disk = ConeDisk::new(n, 1.0)?;
    let pairs = mover_pairs(&disk, 2000, seed)?;
    stress_targets(&disk).par_iter().map(|x| mover_report(&disk, x, &pairs)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CircleCheck {
    pub n: u32,
    pub r: f64,
    pub exact: f64,
    pub sampled: f64,
    pub relative_error: f64,
}

/// `nπr` against the polygonal length of `m` equally spaced circle points.
pub fn circle_cross_check(n: u32, r: f64, m: usize) -> Result<CircleCheck> {
    let disk = ConeDisk::new(n, r)?;
    let exact = circle_length(n, r)?;
    let sampled = curve_length(&disk, &sample_circle(&disk, &ConePoint::APEX, r, m)?)?;
    Ok(CircleCheck { n, r, exact, sampled, relative_error: (exact - sampled).abs() / exact })
}

/// Certifies the threshold `n/2` and runs the stress family of apex movers
/// against it with tolerance `epsilon`.
pub fn fix_set_stability(epsilon: f64, n: u32, seed: u64) -> Result<FixSetCertificate> {
    ConeDisk::new(n, 1.0)?;
    let threshold = f64::from(n) / 2.0;
    let loglips_radius = threshold.ln() / 2.0;
    if n == 2 {
        return Ok(FixSetCertificate {
            n,
            threshold,
            loglips_radius,
            vacuous: true,
            stress_maps: 0,
            stress_min_product: None,
            tolerance: epsilon,
            separates: false,
        });
    }
    let products: Vec<f64> = stress_family(n, seed)?.iter().map(|r| r.product).collect();
    let min = products.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(FixSetCertificate {
        n,
        threshold,
        loglips_radius,
        vacuous: false,
        stress_maps: products.len(),
        stress_min_product: Some(min),
        tolerance: epsilon,
        separates: min >= threshold - epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::MetricSpace;

    #[test]
    fn circle_lengths() {
        assert!((circle_length(2, 1.0).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!((circle_length(3, 0.1).unwrap() - 0.942_477_796_076_938).abs() < 1e-12);
        assert!((circle_length(4, 1.0).unwrap() - 4.0 * PI).abs() < 1e-15);
        assert!(circle_length(1, 1.0).is_err());
        assert!(circle_length(3, 0.0).is_err());
    }

    #[test]
    fn sampled_circles_converge() {
        for n in 2..=5 {
            let disk = ConeDisk::new(n, 1.0).unwrap();
            for r in [0.1, 0.5, 1.0] {
                let c = sample_circle(&disk, &ConePoint::APEX, r, 10_000).unwrap();
                let exact = circle_length(n, r).unwrap();
                let len = curve_length(&disk, &c).unwrap();
                assert!(len <= exact && (exact - len) / exact < 1e-3, "n={n} r={r}");
            }
        }
    }

    #[test]
    fn flat_circles_around_regular_points() {
        let disk = ConeDisk::new(3, 1.0).unwrap();
        let x = disk.point(0.5, 1.0);
        let c = sample_circle(&disk, &x, 0.1, 2000).unwrap();
        assert!(c.points.iter().all(|p| (cone_distance(3, &x, p) - 0.1).abs() < 1e-12));
        let len = curve_length(&disk, &c).unwrap();
        assert!((len - 0.2 * PI).abs() < 1e-6);
        assert!(sample_circle(&disk, &x, 0.5, 100).is_err());
    }

    #[test]
    fn simple_curves() {
        let disk = ConeDisk::new(3, 1.0).unwrap();
        let seg = CurveSample::new((0..=100).map(|k| disk.point(k as f64 / 100.0, 0.7)).collect(), false, 0.011);
        assert!((curve_length(&disk, &seg).unwrap() - 1.0).abs() < 1e-12);
        let (p, q) = (disk.point(0.3, 0.0), disk.point(0.4, 2.5));
        let two = CurveSample::new(vec![p, q], false, 1.0);
        assert_eq!(curve_length(&disk, &two).unwrap(), cone_distance(3, &p, &q));
        let coarse = CurveSample::new(vec![p, q], false, 0.1);
        assert!(matches!(curve_length(&disk, &coarse), Err(Error::MeshViolated { index: 0, .. })));
    }

    #[test]
    fn midpoints_split_geodesics() {
        let disk = ConeDisk::new(5, 1.0).unwrap();
        for (p, q) in [
            (disk.point(0.3, 0.1), disk.point(0.6, 2.0)),
            (disk.point(0.3, 0.1), disk.point(0.6, 4.0)),
            (disk.point(0.7, 15.0), disk.point(0.2, 0.3)),
            (disk.point(0.4, 1.0), ConePoint::APEX),
        ] {
            let m = geodesic_midpoint(&disk, &p, &q);
            let d = cone_distance(5, &p, &q);
            assert!((cone_distance(5, &p, &m) - d / 2.0).abs() < 1e-12);
            assert!((cone_distance(5, &m, &q) - d / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mover_is_a_homeomorphism_onto_the_apex() {
        let disk = ConeDisk::new(3, 1.0).unwrap();
        let x = disk.point(0.1, 2.0);
        let j = apex_mover(&disk, &x).unwrap();
        assert!(j.apply(&x).unwrap().r < 1e-15);
        let far = disk.point(0.9, 1.0);
        assert_eq!(j.apply(&far).unwrap(), far);
        let pts = disk.sample_points(500, 3);
        for p in &pts {
            let q = j.apply_inverse(&j.apply(p).unwrap()).unwrap();
            assert!(cone_distance(3, p, &q) < 1e-12);
        }
        assert!(apex_mover(&disk, &disk.point(0.3, 0.0)).is_err());
    }

    #[test]
    fn rigidity_chain_for_movers() {
        for (n, t) in [(3, 0.1), (4, 0.1), (5, 0.15)] {
            let disk = ConeDisk::new(n, 1.0).unwrap();
            let pairs = mover_pairs(&disk, 500, 7).unwrap();
            let r = mover_report(&disk, &disk.point(t, 1.0), &pairs).unwrap();
            assert!(r.length_upper_holds && r.isoperimetric_holds && r.inverse_ratio_holds && r.product_holds, "{r:?}");
            assert!(r.product >= f64::from(n) / 2.0 - 1e-2);
        }
    }

    #[test]
    fn rotations_make_no_claim() {
        let disk = ConeDisk::new(3, 1.0).unwrap();
        let pairs = mover_pairs(&disk, 50, 1).unwrap();
        let rot = cone_rotation(&disk, 0.4);
        let x = disk.point(0.2, 0.0);
        assert!(matches!(rigidity_product(&disk, &rot, &x, 0.05, &pairs), Err(Error::Precondition(_))));
    }

    #[test]
    fn plane_case_is_vacuous() {
        let c = fix_set_stability(1e-2, 2, 1).unwrap();
        assert!(c.vacuous && c.threshold == 1.0 && c.loglips_radius == 0.0);
    }
}
