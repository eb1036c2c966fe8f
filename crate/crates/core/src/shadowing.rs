//! Pseudo-orbits and exact shadowing for hyperbolic toral automorphisms.
//!
//! For `A` hyperbolic, a pseudo-orbit `x_n` with defects `d_n = x_{n+1} − A x_n`
//! is traced by `y_n = x_n + e_n` where `e_{n+1} = A e_n − d_n`. In eigen
//! coordinates the stable part is summed from the past and the unstable part
//! from the future; truncating the window to `|n| ≤ N` costs a tail that
//! decays like `|λ_u|^−N`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::Vec2;
use crate::maps::{MapSystem, ToralAutomorphism};
use crate::parallel::argmin;
use crate::spaces::{sample_rng, torus_delta, torus_distance, FlatTorus, MetricSpace, TorusPoint};
use crate::{Error, Result};

/// Points `x_n` for `n ∈ [−N, N]` and their largest one-step defect.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PseudoOrbit {
    window: usize,
    points: Vec<TorusPoint>,
    delta: f64,
}

impl PseudoOrbit {
    /// `points[k]` is `x_{k−N}`; `delta` is recomputed against `f`.
    pub fn new(f: &MapSystem<TorusPoint>, points: Vec<TorusPoint>) -> Result<Self> {
        if points.is_empty() || points.len() % 2 == 0 {
            return Err(Error::InvalidParameter(format!("a pseudo-orbit needs 2N+1 points, got {}", points.len())));
        }
        let window = points.len() / 2;
        let mut po = Self { window, points, delta: 0.0 };
        po.delta = po.gaps(f)?.into_iter().fold(0.0, f64::max);
        Ok(po)
    }

    /// The orbit of `x` under `g` over `[−N, N]`, read as a pseudo-orbit of `f`.
    pub fn from_orbit(f: &MapSystem<TorusPoint>, g: &MapSystem<TorusPoint>, x: &TorusPoint, window: usize) -> Result<Self> {
        let mut back = Vec::with_capacity(window);
        let mut p = *x;
        for _ in 0..window {
            p = g.apply_inverse(&p)?;
            back.push(p);
        }
        back.reverse();
        let mut points = back;
        points.push(*x);
        let mut p = *x;
        for _ in 0..window {
            p = g.apply(&p)?;
            points.push(p);
        }
        Self::new(f, points)
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn points(&self) -> &[TorusPoint] {
        &self.points
    }

    /// `x_n`, `|n| ≤ N`.
    pub fn point(&self, n: i64) -> TorusPoint {
        self.points[(n + self.window as i64) as usize]
    }

    /// `d(f(x_n), x_{n+1})` for `n ∈ [−N, N−1]`.
    pub fn gaps(&self, f: &MapSystem<TorusPoint>) -> Result<Vec<f64>> {
        self.points.windows(2).map(|w| Ok(torus_distance(&f.apply(&w[0])?, &w[1]))).collect()
    }
}

/// A `delta`-pseudo-orbit of `f` through `x0`: each step adds a uniform
/// random kick of norm below `delta`. Backward steps solve
/// `f(x_{n−1}) = x_n − kick`, so the defect is the kick up to rounding.
pub fn make_pseudo_orbit(f: &MapSystem<TorusPoint>, x0: &TorusPoint, delta: f64, window: usize, seed: u64) -> Result<PseudoOrbit> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be nonnegative, got {delta}")));
    }
    let mut rng = sample_rng(seed, 3);
    let mut kick = || {
        if delta == 0.0 {
            return Vec2::zeros();
        }
        let r = delta * rng.gen::<f64>().sqrt() * (1.0 - 1e-9);
        let t = TAU * rng.gen::<f64>();
        Vec2::new(r * t.cos(), r * t.sin())
    };
    let mut forward = Vec::with_capacity(window);
    let mut p = *x0;
    for _ in 0..window {
        p = f.apply(&p)?.translate(kick());
        forward.push(p);
    }
    let mut back = Vec::with_capacity(window);
    let mut p = *x0;
    for _ in 0..window {
        p = f.apply_inverse(&p.translate(-kick()))?;
        back.push(p);
    }
    back.reverse();
    back.push(*x0);
    back.extend(forward);
    PseudoOrbit::new(f, back)
}

/// The true orbit `y_n` tracing a pseudo-orbit, and its certified bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Shadow {
    pub window: usize,
    pub shadow: Vec<TorusPoint>,
    /// `e_n = y_n − x_n` as a small lift.
    #[serde(skip)]
    pub corrections: Vec<Vec2>,
    pub sup_correction: f64,
    /// `δ·(r_u/(|λ_u|−1) + r_s/(1−|λ_s|)) + edge_tail`, where `r_u`, `r_s` are
    /// the norms of the rows of the eigenbasis inverse.
    pub bound: f64,
    /// `diam·|λ_u|^−N`.
    pub edge_tail: f64,
    /// `max d(A y_n, y_{n+1})`.
    pub residual: f64,
}

impl Shadow {
    pub fn point(&self, n: i64) -> TorusPoint {
        self.shadow[(n + self.window as i64) as usize]
    }

    pub fn correction(&self, n: i64) -> Vec2 {
        self.corrections[(n + self.window as i64) as usize]
    }
}

/// Largest defect eigen-coordinate for which the small lift is trusted.
pub const MAX_DEFECT_COORD: f64 = 0.25;

/// `δ·(r_u/(|λ_u|−1) + r_s/(1−|λ_s|))`: the sup of `|e_n|` for defects of norm `δ`.
pub fn shadowing_bound(a: &ToralAutomorphism, delta: f64) -> f64 {
    let m = a.to_eigen();
    let (r_u, r_s) = (m.row(0).norm(), m.row(1).norm());
    delta * (r_u / (a.lambda_u().abs() - 1.0) + r_s / (1.0 - a.lambda_s().abs()))
}

/// Solves the shadowing recurrence for a pseudo-orbit of `A`.
pub fn shadow_linear(a: &ToralAutomorphism, po: &PseudoOrbit) -> Result<Shadow> {
    let n = po.window as i64;
    let x = po.points();
    let len = x.len();
    let (lu, ls) = (a.lambda_u(), a.lambda_s());
    let mut du = vec![0.0; len - 1];
    let mut ds = vec![0.0; len - 1];
    for k in 0..len - 1 {
        let d = torus_delta(&a.apply(&x[k]), &x[k + 1]);
        let e = a.eigen_coords(&d);
        if e.x.abs() >= MAX_DEFECT_COORD || e.y.abs() >= MAX_DEFECT_COORD {
            return Err(Error::ShadowingPrecondition { index: k as i64 - n, du: e.x, ds: e.y });
        }
        du[k] = e.x;
        ds[k] = e.y;
    }
    let mut u = vec![0.0; len];
    let mut s = vec![0.0; len];
    for k in 0..len - 1 {
        s[k + 1] = ls * s[k] - ds[k];
    }
    for k in (0..len - 1).rev() {
        u[k] = (u[k + 1] + du[k]) / lu;
    }
    let (eu, es) = (a.unstable_direction(), a.stable_direction());
    let corrections: Vec<Vec2> = (0..len).map(|k| eu * u[k] + es * s[k]).collect();
    let shadow: Vec<TorusPoint> = x.iter().zip(&corrections).map(|(p, e)| p.translate(*e)).collect();
    let residual = shadow.windows(2).map(|w| torus_distance(&a.apply(&w[0]), &w[1])).fold(0.0, f64::max);
    let sup_correction = corrections.iter().map(|e| e.norm()).fold(0.0, f64::max);
    let edge_tail = FlatTorus.diameter() * lu.abs().powi(-(n as i32));
    Ok(Shadow {
        window: po.window,
        shadow,
        corrections,
        sup_correction,
        bound: shadowing_bound(a, po.delta()) + edge_tail,
        edge_tail,
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConjugacySample {
    pub x: TorusPoint,
    pub h: TorusPoint,
    /// `|h(x) − x|` on the torus.
    pub displacement: f64,
}

/// `h` on the grid `(i/n, j/n)` with `A∘h = h∘g`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugacyField {
    pub grid_n: usize,
    pub window: usize,
    #[serde(skip)]
    pub samples: Vec<ConjugacySample>,
    /// `max d(A h(x), h(g(x)))`, with `h(g(x))` from a separate solve.
    pub residual: f64,
    /// `max d(h(x), x)`.
    pub id_dist: f64,
    /// Smallest distance between two grid images.
    pub injectivity_margin: f64,
    /// Largest pseudo-orbit defect met on the grid.
    pub max_defect: f64,
    /// Largest certified shadowing bound on the grid.
    pub shadow_bound: f64,
}

impl ConjugacyField {
    /// `x1,x2,h1,h2,displacement` rows with a header, shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x1,x2,h1,h2,displacement\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{},{},{},{}", s.x.x(), s.x.y(), s.h.x(), s.h.y(), s.displacement);
        }
        out
    }
}

fn shadow_point(a: &ToralAutomorphism, f: &MapSystem<TorusPoint>, g: &MapSystem<TorusPoint>, x: &TorusPoint, window: usize) -> Result<(TorusPoint, f64, f64)> {
    let wrap = |source: Error| Error::ConjugacyPrecondition { x: x.x(), y: x.y(), source: Box::new(source) };
    let po = PseudoOrbit::from_orbit(f, g, x, window).map_err(wrap)?;
    let s = shadow_linear(a, &po).map_err(wrap)?;
    Ok((s.point(0), po.delta(), s.bound))
}

/// Builds `h(x)` as the `A`-orbit shadowing the `g`-orbit of `x`.
pub fn build_conjugacy(a: &ToralAutomorphism, g: &MapSystem<TorusPoint>, grid_n: usize, window: usize) -> Result<ConjugacyField> {
    if grid_n == 0 {
        return Err(Error::InvalidParameter("grid size must be positive".into()));
    }
    let f = a.system();
    let grid: Vec<TorusPoint> = (0..grid_n * grid_n)
        .map(|k| TorusPoint::new((k / grid_n) as f64 / grid_n as f64, (k % grid_n) as f64 / grid_n as f64))
        .collect();
    let solved: Vec<(ConjugacySample, f64, f64, f64)> = grid
        .par_iter()
        .map(|x| {
            let (h, delta, bound) = shadow_point(a, &f, g, x, window)?;
            let gx = g.apply(x)?;
            let (hgx, _, _) = shadow_point(a, &f, g, &gx, window)?;
            let residual = torus_distance(&a.apply(&h), &hgx);
            Ok((ConjugacySample { x: *x, h, displacement: torus_distance(x, &h) }, residual, delta, bound))
        })
        .collect::<Result<_>>()?;
    let fold = |k: fn(&(ConjugacySample, f64, f64, f64)) -> f64| solved.iter().map(k).fold(0.0, f64::max);
    let residual = fold(|s| s.1);
    let max_defect = fold(|s| s.2);
    let shadow_bound = fold(|s| s.3);
    let id_dist = fold(|s| s.0.displacement);
    let samples: Vec<ConjugacySample> = solved.into_iter().map(|s| s.0).collect();
    let injectivity_margin = if samples.len() < 2 {
        f64::INFINITY
    } else {
        argmin(samples.len() - 1, |i| {
            Ok(samples[i + 1..].iter().map(|t| torus_distance(&samples[i].h, &t.h)).fold(f64::INFINITY, f64::min))
        })?
        .map_or(f64::INFINITY, |(v, _)| v)
    };
    Ok(ConjugacyField { grid_n, window, samples, residual, id_dist, injectivity_margin, max_defect, shadow_bound })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PersistenceFailure {
    pub x: TorusPoint,
    /// `None` when no tracing orbit could be constructed.
    pub deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PersistenceReport {
    pub samples: usize,
    pub window: usize,
    pub epsilon: f64,
    pub success_fraction: f64,
    /// Largest `max_n d(Aⁿ x, gⁿ y)` over the samples that produced a `y`.
    pub worst_deviation: f64,
    pub failures: Vec<PersistenceFailure>,
}

const PERSISTENCE_TOL: f64 = 1e-14;
const PERSISTENCE_MAX_ITER: usize = 60;

/// Finds `y` with `h(y) = x`, where `h` sends a `g`-orbit to the `A`-orbit
/// shadowing it, by the iteration `y ← y + (x − h(y))`. Returns `y` and
/// `max_n |gⁿ y − Aⁿ x|`, measured against the computed `A`-orbit through `x`.
fn trace_by_g(a: &ToralAutomorphism, f: &MapSystem<TorusPoint>, g: &MapSystem<TorusPoint>, x: &TorusPoint, window: usize) -> Result<(TorusPoint, f64)> {
    let mut y = *x;
    for _ in 0..PERSISTENCE_MAX_ITER {
        let po = PseudoOrbit::from_orbit(f, g, &y, window)?;
        let s = shadow_linear(a, &po)?;
        let miss = torus_delta(&s.point(0), x);
        if miss.norm() <= PERSISTENCE_TOL {
            return Ok((y, s.sup_correction + miss.norm()));
        }
        y = y.translate(miss);
    }
    Err(Error::InverseDidNotConverge { map: format!("persistence search for {}", g.name()), last_step: f64::NAN })
}

/// For each sample `x`, searches a `g`-orbit that stays `epsilon`-close to
/// the `A`-orbit of `x` over `|n| ≤ window`.
pub fn persistence_check(a: &ToralAutomorphism, g: &MapSystem<TorusPoint>, pts: &[TorusPoint], window: usize, epsilon: f64) -> Result<PersistenceReport> {
    if pts.is_empty() {
        return Err(Error::EmptySample("persistence sample"));
    }
    let f = a.system();
    let outcomes: Vec<Option<f64>> = pts.par_iter().map(|x| trace_by_g(a, &f, g, x, window).ok().map(|(_, dev)| dev)).collect();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (x, dev) in pts.iter().zip(&outcomes) {
        if let Some(d) = dev {
            worst = worst.max(*d);
        }
        if !matches!(dev, Some(d) if *d < epsilon) {
            failures.push(PersistenceFailure { x: *x, deviation: *dev });
        }
    }
    Ok(PersistenceReport {
        samples: pts.len(),
        window,
        epsilon,
        success_fraction: (pts.len() - failures.len()) as f64 / pts.len() as f64,
        worst_deviation: worst,
        failures,
    })
}

/// The point `y` found by [`persistence_check`] for a single `x`.
pub fn persistence_witness(a: &ToralAutomorphism, g: &MapSystem<TorusPoint>, x: &TorusPoint, window: usize) -> Result<TorusPoint> {
    trace_by_g(a, &a.system(), g, x, window).map(|(y, _)| y)
}
