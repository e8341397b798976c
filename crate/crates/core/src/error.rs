use thiserror::Error;

/// Errors produced by mesh construction, assembly, solvers and experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid gluing: {0}")]
    InvalidGluing(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("factorization error: {0}")]
    Factorization(String),

    #[error("no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    Bracket { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("under-resolved mesh: {0}")]
    Resolution(String),

    #[error("eigensolver: {0}")]
    Eigen(String),

    #[error("mesh generation: {0}")]
    Meshing(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
