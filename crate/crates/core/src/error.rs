use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("momentum |p| = {p} is outside the band |p| < k = {k}")]
    MomentumOutOfBand { p: f64, k: f64 },
    #[error("degenerate coefficient match: {0}")]
    DegenerateMatch(String),
    #[error("field has (near) zero norm")]
    ZeroNorm,
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
