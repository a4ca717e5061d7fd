use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("Gamma pole at z = {0}")]
    Pole(i64),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("non-finite integrand at node {node}")]
    Evaluation { node: Complex64 },

    #[error("tolerance not met: value {value}, error estimate {err:e}")]
    Tolerance { value: Complex64, err: f64 },

    #[error("series failed to converge after {terms} terms")]
    Divergence { terms: usize },

    #[error("numeric conditioning failure: log-magnitude {log_magnitude:.1}")]
    Conditioning { log_magnitude: f64 },

    #[error("bracketing failed: {0}")]
    Bracketing(String),

    #[error("Newton continuation did not converge at z = {z}")]
    Continuation { z: Complex64 },

    #[error("polynomial has non-real roots: max |Im| = {max_imag:e}")]
    RealRootsViolation { max_imag: f64 },

    #[error("representation mismatch: {0}")]
    RepresentationMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Conditioning { .. } | Error::Tolerance { .. } | Error::Divergence { .. } => 3,
            Error::Config(_) | Error::Unsupported(_) | Error::Domain(_) => 2,
            _ => 3,
        }
    }
}
