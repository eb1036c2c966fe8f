use std::f64::consts::TAU;

use rand::Rng;
use serde::Serialize;

use super::{MetricSpace, SampleRng};
use crate::linalg::Vec2;

/// Reduce a real number into `[0, 1)`.
pub fn wrap_unit(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    // rem_euclid of a tiny negative number rounds up to 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// A point of the flat torus `R²/Z²`, coordinates kept in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TorusPoint {
    x: f64,
    y: f64,
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self {
            x: wrap_unit(x),
            y: wrap_unit(y),
        }
    }

    pub fn from_vec(v: Vec2) -> Self {
        Self::new(v.x, v.y)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// The representative of this point in `[0, 1)²`.
    pub fn to_vec(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn translate(&self, v: Vec2) -> Self {
        Self::new(self.x + v.x, self.y + v.y)
    }
}

/// Shortest lift of `q - p`, with coordinates in `[-1/2, 1/2]`.
pub fn torus_delta(p: &TorusPoint, q: &TorusPoint) -> Vec2 {
    let dx = q.x - p.x;
    let dy = q.y - p.y;
    Vec2::new(dx - dx.round(), dy - dy.round())
}

/// Flat quotient distance: the shortest Euclidean length over integer lifts.
pub fn torus_distance(p: &TorusPoint, q: &TorusPoint) -> f64 {
    let d = torus_delta(p, q);
    d.x.hypot(d.y)
}

/// The unit square with opposite sides identified and the flat metric.
#[derive(Clone, Copy, Debug, Default)]
pub struct FlatTorus;

impl MetricSpace for FlatTorus {
    type Point = TorusPoint;

    fn distance(&self, p: &TorusPoint, q: &TorusPoint) -> f64 {
        torus_distance(p, q)
    }

    fn diameter(&self) -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    fn random_point(&self, rng: &mut SampleRng) -> TorusPoint {
        TorusPoint::new(rng.gen::<f64>(), rng.gen::<f64>())
    }

    fn random_near(&self, p: &TorusPoint, radius: f64, rng: &mut SampleRng) -> Option<TorusPoint> {
        let rho = radius.min(0.5) * rng.gen::<f64>().sqrt();
        let phi = TAU * rng.gen::<f64>();
        Some(p.translate(Vec2::new(rho * phi.cos(), rho * phi.sin())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::axioms::check_sampled_triples;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let o = TorusPoint::new(0.0, 0.0);
        let h = TorusPoint::new(0.5, 0.5);
        assert!((torus_distance(&o, &h) - 0.5f64.sqrt()).abs() < 1e-15);
        let a = TorusPoint::new(0.9, 0.0);
        let b = TorusPoint::new(0.1, 0.0);
        assert!((torus_distance(&a, &b) - 0.2).abs() < 1e-15);
        assert_eq!(torus_distance(&a, &a), 0.0);
    }

    #[test]
    fn coordinates_reduce_into_unit_square() {
        let p = TorusPoint::new(-1e-18, 3.25);
        assert!((0.0..1.0).contains(&p.x()));
        assert_eq!(p.y(), 0.25);
        assert_eq!(TorusPoint::new(-0.25, 1.0), TorusPoint::new(0.75, 0.0));
    }

    #[test]
    fn metric_axioms_on_samples() {
        check_sampled_triples(&FlatTorus, 60, 3);
    }

    #[test]
    fn distance_never_exceeds_half_diagonal() {
        for p in FlatTorus.sample_points(400, 11).windows(2) {
            assert!(torus_distance(&p[0], &p[1]) <= FlatTorus.diameter() + 1e-15);
        }
    }

    fn dyadic() -> impl Strategy<Value = f64> {
        (0u32..(1 << 20)).prop_map(|k| k as f64 / (1u32 << 20) as f64)
    }

    proptest! {
        // Dyadic coordinates keep every sum exact, so invariance is bitwise.
        #[test]
        fn translation_invariance_is_exact_on_dyadics(
            px in dyadic(), py in dyadic(), qx in dyadic(), qy in dyadic(),
            tx in dyadic(), ty in dyadic(),
        ) {
            let p = TorusPoint::new(px, py);
            let q = TorusPoint::new(qx, qy);
            let t = Vec2::new(tx, ty);
            prop_assert_eq!(torus_distance(&p.translate(t), &q.translate(t)), torus_distance(&p, &q));
        }

        #[test]
        fn translation_invariance_on_reals(
            px in 0.0..1.0f64, py in 0.0..1.0f64, qx in 0.0..1.0f64, qy in 0.0..1.0f64,
            tx in -3.0..3.0f64, ty in -3.0..3.0f64,
        ) {
            let p = TorusPoint::new(px, py);
            let q = TorusPoint::new(qx, qy);
            let t = Vec2::new(tx, ty);
            let d0 = torus_distance(&p, &q);
            let d1 = torus_distance(&p.translate(t), &q.translate(t));
            prop_assert!((d0 - d1).abs() < 1e-14);
        }
    }
}
