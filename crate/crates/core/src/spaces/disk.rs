use std::f64::consts::TAU;

use rand::Rng;
use serde::Serialize;

use super::{MetricSpace, SampleRng};
use crate::linalg::Vec2;

/// A point of the closed unit disk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiskPoint {
    pub x: f64,
    pub y: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: r * c, y: r * s }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn to_vec(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn from_vec(v: Vec2) -> Self {
        Self { x: v.x, y: v.y }
    }

    pub fn in_disk(&self) -> bool {
        self.norm() <= 1.0 + 4.0 * f64::EPSILON
    }
}

/// `{x² + y² ≤ 1}` with the Euclidean distance.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitDisk;

impl MetricSpace for UnitDisk {
    type Point = DiskPoint;

    fn distance(&self, p: &DiskPoint, q: &DiskPoint) -> f64 {
        (q.x - p.x).hypot(q.y - p.y)
    }

    fn diameter(&self) -> f64 {
        2.0
    }

    fn random_point(&self, rng: &mut SampleRng) -> DiskPoint {
        let r = rng.gen::<f64>().sqrt();
        DiskPoint::polar(r, TAU * rng.gen::<f64>())
    }

    fn random_near(&self, p: &DiskPoint, radius: f64, rng: &mut SampleRng) -> Option<DiskPoint> {
        for _ in 0..32 {
            let rho = radius * rng.gen::<f64>().sqrt();
            let step = DiskPoint::polar(rho, TAU * rng.gen::<f64>());
            let q = DiskPoint::new(p.x + step.x, p.y + step.y);
            if q.norm() <= 1.0 {
                return Some(q);
            }
        }
        None
    }
}
