//! Bi-Lipschitz homeomorphisms given by forward and inverse evaluators.
//!
//! The catalog covers the hyperbolic toral automorphisms and their affine and
//! bump perturbations, torus translations, the shift and its symbol-permuting
//! Walters perturbations, and smooth increasing maps of the unit interval.

mod interval;
mod shift;
mod torus;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::Result;

pub use interval::{interval_scaling, IntervalDiffeo};
pub use shift::{shift_map, shift_system, walters_perturbation, SymbolPermutation};
pub use torus::{cat_map, perturb_torus, torus_rotation, Perturbation, ToralAutomorphism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

type Evaluator<P> = Arc<dyn Fn(&P) -> Result<P> + Send + Sync>;

/// A homeomorphism of a metric space with an explicit inverse.
///
/// Evaluators are fallible only where the inverse is computed iteratively.
pub struct MapSystem<P> {
    name: String,
    forward: Evaluator<P>,
    inverse: Evaluator<P>,
}

impl<P> Clone for MapSystem<P> {
    fn clone(&self) -> Self {
        Self { name: self.name.clone(), forward: self.forward.clone(), inverse: self.inverse.clone() }
    }
}

impl<P> fmt::Debug for MapSystem<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapSystem").field("name", &self.name).finish_non_exhaustive()
    }
}

impl<P: 'static> MapSystem<P> {
    pub fn new<F, G>(name: impl Into<String>, forward: F, inverse: G) -> Self
    where
        F: Fn(&P) -> Result<P> + Send + Sync + 'static,
        G: Fn(&P) -> Result<P> + Send + Sync + 'static,
    {
        Self { name: name.into(), forward: Arc::new(forward), inverse: Arc::new(inverse) }
    }

    /// A map whose evaluators cannot fail.
    pub fn exact<F, G>(name: impl Into<String>, forward: F, inverse: G) -> Self
    where
        F: Fn(&P) -> P + Send + Sync + 'static,
        G: Fn(&P) -> P + Send + Sync + 'static,
    {
        Self::new(name, move |p| Ok(forward(p)), move |p| Ok(inverse(p)))
    }

    pub fn identity() -> Self
    where
        P: Clone,
    {
        Self::exact("id", P::clone, P::clone)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn apply(&self, p: &P) -> Result<P> {
        (self.forward)(p)
    }

    pub fn apply_inverse(&self, p: &P) -> Result<P> {
        (self.inverse)(p)
    }

    pub fn eval(&self, direction: Direction, p: &P) -> Result<P> {
        match direction {
            Direction::Forward => self.apply(p),
            Direction::Inverse => self.apply_inverse(p),
        }
    }

    /// `f⁻¹` as a map in its own right.
    pub fn inverse(&self) -> Self {
        Self { name: format!("{}^-1", self.name), forward: self.inverse.clone(), inverse: self.forward.clone() }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &MapSystem<P>) -> Self {
        let (f, g) = (self.forward.clone(), other.forward.clone());
        let (fi, gi) = (self.inverse.clone(), other.inverse.clone());
        Self {
            name: format!("{}*{}", self.name, other.name),
            forward: Arc::new(move |p| f(&g(p)?)),
            inverse: Arc::new(move |p| gi(&fi(p)?)),
        }
    }

    /// `n`-th iterate, negative `n` iterating the inverse.
    pub fn iterate(&self, n: i64, p: &P) -> Result<P>
    where
        P: Clone,
    {
        let mut q = p.clone();
        for _ in 0..n.unsigned_abs() {
            q = if n > 0 { self.apply(&q)? } else { self.apply_inverse(&q)? };
        }
        Ok(q)
    }
}
