use thiserror::Error;

#[derive(Debug, Error)]
pub enum TripleError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("elements belong to different triple systems")]
    SystemMismatch,

    #[error("invalid factor spec: {0}")]
    InvalidSpec(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("element is not a tripotent (residual {residual:.3e})")]
    NotTripotent { residual: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dimension {dim} exceeds the cap of {cap}")]
    TooLarge { dim: usize, cap: usize },

    #[error("empty factor list")]
    EmptySpec,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, TripleError>;
