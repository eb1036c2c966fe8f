//! Lipschitz perturbation toolkit for expansive homeomorphisms.
//!
//! The crate computes the uniform, Walters and Lipschitz distances between
//! bi-Lipschitz homeomorphisms of compact metric spaces, certifies
//! hyperbolicity of a metric for a map, shadows pseudo-orbits of hyperbolic
//! toral automorphisms to build conjugacies with their perturbations, checks
//! the flat-cone rigidity of singular points, and reproduces a family of disk
//! diffeomorphisms that are Walters-close to the identity but C¹-far from it.
//!
//! Every supremum over an uncountable set is estimated over an explicit
//! sample and reported as a lower bound together with the pair that attains
//! it.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`spaces`] | torus, disk, interval, truncated shift, flat cone, finite tables |
//! | [`maps`] | toral automorphisms and their perturbations, the shift, interval diffeomorphisms |
//! | [`map_metrics`] | `d_C0`, `d_W`, `d_L`, Lipschitz norms and the operational metric |
//! | [`hyperbolicity`] | hyperbolicity certificates, adapted metrics, robust expansiveness |
//! | [`shadowing`] | pseudo-orbits, linear shadowing, conjugacy fields, persistence |
//! | [`cone_rigidity`] | cone circles, curve lengths, the singular-point rigidity chain |
//! | [`smooth_compare`] | the rotation-profile counterexample, interval and `d_C1` comparisons |
//! | [`cli`] | the `lipexp` command line front end |

pub mod cli;
pub mod cone_rigidity;
mod error;
pub mod hyperbolicity;
pub mod linalg;
pub mod map_metrics;
pub mod maps;
mod parallel;
pub mod shadowing;
pub mod smooth_compare;
pub mod spaces;

pub use error::{Error, Result};
pub use maps::{Direction, MapSystem};
pub use spaces::{MetricSpace, PairSample};
