use std::fmt;

use super::MapSystem;
use crate::{Error, Result};

/// Increasing diffeomorphisms of `[0, 1]` with closed-form derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IntervalDiffeo {
    Identity,
    /// `x + c·x(1−x)`, `|c| < 1`.
    Poly(f64),
    /// `x + c·x(1−x)(1−2x)`, `|c| < 1`.
    Cubic(f64),
}

impl fmt::Display for IntervalDiffeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "id"),
            Self::Poly(c) => write!(f, "poly:{c}"),
            Self::Cubic(c) => write!(f, "cubic:{c}"),
        }
    }
}

impl IntervalDiffeo {
    /// Parses `id`, `poly:<c>` or `cubic:<c>`.
    pub fn parse(name: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown interval map {name:?}"));
        let map = match name.split_once(':') {
            None if name == "id" => Self::Identity,
            Some(("poly", c)) => Self::Poly(c.parse().map_err(|_| bad())?),
            Some(("cubic", c)) => Self::Cubic(c.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        map.validate()?;
        Ok(map)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Identity => Ok(()),
            Self::Poly(c) | Self::Cubic(c) if c.abs() < 1.0 => Ok(()),
            _ => Err(Error::InvalidParameter(format!("{self} needs |c| < 1 to stay increasing"))),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Self::Identity => x,
            Self::Poly(c) => x + c * x * (1.0 - x),
            Self::Cubic(c) => x + c * x * (1.0 - x) * (1.0 - 2.0 * x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Self::Identity => 1.0,
            Self::Poly(c) => 1.0 + c * (1.0 - 2.0 * x),
            Self::Cubic(c) => 1.0 + c * (1.0 - 6.0 * x + 6.0 * x * x),
        }
    }

    /// Solves `value(x) = y` by Newton steps kept inside a bisection bracket.
    pub fn inverse(&self, y: f64) -> f64 {
        if let Self::Identity = self {
            return y;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut x = y.clamp(0.0, 1.0);
        for _ in 0..100 {
            let r = self.value(x) - y;
            if r == 0.0 {
                return x;
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - r / self.derivative(x);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if next == x || hi - lo <= f64::EPSILON * hi.max(1e-300) {
                return next;
            }
            x = next;
        }
        x
    }

    /// Endpoint and positive-derivative checks on `grid_n + 1` points.
    pub fn check(&self, grid_n: usize) -> Result<()> {
        self.validate()?;
        let ends_ok = self.value(0.0) == 0.0 && (self.value(1.0) - 1.0).abs() <= f64::EPSILON;
        let n = grid_n.max(1);
        if !ends_ok || (0..=n).any(|i| self.derivative(i as f64 / n as f64) <= 0.0) {
            return Err(Error::NonMonotone(self.to_string()));
        }
        Ok(())
    }

    pub fn system(&self) -> MapSystem<f64> {
        let (f, g) = (*self, *self);
        MapSystem::exact(format!("interval:{self}"), move |x| f.value(*x), move |y| g.inverse(*y))
    }
}

/// `x ↦ s·x` as a map onto its image, for comparisons on `[0, 1]`.
pub fn interval_scaling(s: f64) -> Result<MapSystem<f64>> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("scaling factor {s} must be positive")));
    }
    Ok(MapSystem::exact(format!("scale:{s}"), move |x| s * x, move |y| y / s))
}
