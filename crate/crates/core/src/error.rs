use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate simplex (zero measure)")]
    DegenerateSimplex,

    #[error("singular affine map")]
    SingularMap,

    #[error("piecewise input requires the split center as base point")]
    BaseNotCenter,

    #[error("input is not mean-zero (integral {0})")]
    NotMeanZero(String),

    #[error("divergence target not attainable: {0}")]
    NoPreimage(String),

    #[error("dimension mismatch building {what}: expected {expected}, got {got}")]
    Dimension {
        what: String,
        expected: usize,
        got: usize,
    },

    #[error("DOF matrix for {what} is singular; null combination {null:?}")]
    NotUnisolvent { what: String, null: Vec<String> },

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("eigen solver failure: {0}")]
    Eigen(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
