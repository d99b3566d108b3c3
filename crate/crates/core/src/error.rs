use thiserror::Error;

/// Errors produced by grid construction, physics evaluation and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid medium parameters: {0}")]
    InvalidParams(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("operation requires delta = +gamma or -gamma, got delta = {delta} with gamma = {gamma}")]
    DetuningOffResonance { delta: f64, gamma: f64 },

    #[error("group velocity undefined: alpha * gamma_p must be positive")]
    GroupVelocityUndefined,

    #[error("negative propagation length through an absorbing medium: {0} m")]
    NegativeEitLength(f64),

    #[error("under-resolved feature: {0}")]
    UnresolvedFeature(String),

    #[error("optical train is empty")]
    EmptyTrain,

    #[error("field has zero power")]
    ZeroPower,

    #[error("analysis window too small: {0}")]
    WindowTooSmall(String),

    #[error("finite-difference step too large: second-derivative estimate did not converge")]
    FdNotConverged,

    #[error("non-positive input: {0}")]
    NonPositive(String),

    #[error("malformed PGM: {0}")]
    MalformedPgm(String),

    #[error("mask does not fit the grid: {0}")]
    MaskTooLarge(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
