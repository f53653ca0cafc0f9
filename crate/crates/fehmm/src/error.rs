//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("point ({0}, {1}) lies outside the mesh domain")]
    OutOfDomain(f64, f64),

    #[error("invalid material parameters: {0}")]
    Material(String),

    #[error("constraint matrix is rank deficient; offending rows: {rows:?}")]
    RankDeficient { rows: Vec<usize> },

    #[error("singular system: zero pivot at reduced index {index} ({context})")]
    Singular { index: usize, context: String },

    #[error("solver did not reach the requested residual: got {achieved:.3e}, wanted {wanted:.3e}")]
    ResidualTooLarge { achieved: f64, wanted: f64 },

    #[error("iteration did not converge after {iterations} steps; residual history: {history:?}")]
    NonConvergence {
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
