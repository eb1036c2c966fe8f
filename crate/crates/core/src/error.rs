use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shift words do not match: {0}")]
    ShiftMismatch(String),

    #[error("empty sample: {0}")]
    EmptySample(&'static str),

    #[error("pair {index} has coincident points")]
    CoincidentPair { index: usize },

    #[error("pair {index} collapses under {map}: image distance is zero")]
    CollapsedImage { index: usize, map: String },

    #[error("could not draw a pair within max_sep = {max_sep} after {attempts} attempts")]
    MaxSepUnsatisfiable { max_sep: f64, attempts: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("inverse iteration did not converge for {map} (last step {last_step:e})")]
    InverseDidNotConverge { map: String, last_step: f64 },

    #[error("shadowing precondition fails at orbit index {index}: defect eigen-coordinates ({du:e}, {ds:e})")]
    ShadowingPrecondition { index: i64, du: f64, ds: f64 },

    #[error("shadowing precondition fails at grid point ({x}, {y}): {source}")]
    ConjugacyPrecondition {
        x: f64,
        y: f64,
        source: Box<Error>,
    },

    #[error("curve step {index} has length {step:e} above the mesh {mesh:e}")]
    MeshViolated { index: usize, step: f64, mesh: f64 },

    #[error("map {0} is not increasing on the check grid")]
    NonMonotone(String),
}
