use rand::Rng;

use super::{MetricSpace, SampleRng};

/// `[0, 1]` with `|x - y|`.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitInterval;

impl MetricSpace for UnitInterval {
    type Point = f64;

    fn distance(&self, p: &f64, q: &f64) -> f64 {
        (q - p).abs()
    }

    fn diameter(&self) -> f64 {
        1.0
    }

    fn random_point(&self, rng: &mut SampleRng) -> f64 {
        rng.gen::<f64>()
    }

    fn random_near(&self, p: &f64, radius: f64, rng: &mut SampleRng) -> Option<f64> {
        let lo = (p - radius).max(0.0);
        let hi = (p + radius).min(1.0);
        Some(lo + (hi - lo) * rng.gen::<f64>())
    }
}
