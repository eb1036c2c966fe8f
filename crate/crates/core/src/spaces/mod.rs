//! Compact metric spaces and deterministic pair sampling.
//!
//! A [`MetricSpace`] couples a point type with a distance and a seeded
//! sampler. Suprema over `x ≠ y` are discretized by a [`PairSample`], which
//! stores a point list and index pairs into it so that a map is evaluated
//! once per point rather than once per pair.

mod cone;
mod disk;
mod finite;
mod interval;
mod pairs;
mod shift;
mod torus;

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use cone::{cone_distance, ConeDisk, ConePoint};
pub use disk::{DiskPoint, UnitDisk};
pub use finite::FiniteMetricSpace;
pub use interval::UnitInterval;
pub use pairs::{sample_pairs, PairSample};
pub use shift::{shift_distance, ShiftSpace, ShiftWord};
pub use torus::{torus_delta, torus_distance, wrap_unit, FlatTorus, TorusPoint};

/// Counter-based generator used by every sampler in the crate.
pub type SampleRng = ChaCha8Rng;

/// Generator for `seed`, on an independent `stream` of the same key.
pub fn sample_rng(seed: u64, stream: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub trait MetricSpace: Sync {
    type Point: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64;

    /// An upper bound for the distance between any two points.
    fn diameter(&self) -> f64;

    fn random_point(&self, rng: &mut SampleRng) -> Self::Point;

    /// A random point at distance at most `radius` from `p`, if the space
    /// resolves that scale. The result may coincide with `p`.
    fn random_near(&self, p: &Self::Point, radius: f64, rng: &mut SampleRng) -> Option<Self::Point>;

    fn sample_points(&self, count: usize, seed: u64) -> Vec<Self::Point> {
        let mut rng = sample_rng(seed, 0);
        (0..count).map(|_| self.random_point(&mut rng)).collect()
    }
}
