use thiserror::Error;

use crate::fractal::RotationMode;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "resource limit exceeded: {what} needs {needed}, cap is {cap} (raise --max-intervals)"
    )]
    ResourceLimit {
        what: &'static str,
        needed: u128,
        cap: usize,
    },

    #[error("{op} does not support {mode:?} mode; {hint}")]
    UnsupportedMode {
        op: &'static str,
        mode: RotationMode,
        hint: &'static str,
    },

    #[error("random stream layout overflow: {0}")]
    LayoutOverflow(String),

    #[error("data error: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
