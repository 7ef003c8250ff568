use std::path::PathBuf;

/// Errors raised across the estimation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("singular system: condition estimate {condition:.3e} exceeds {threshold:.0e}")]
    Singular { condition: f64, threshold: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("outside approximation domain: {0}")]
    ApproximationDomain(String),

    #[error("true channel is identically zero")]
    ZeroChannel,

    #[error("dictionary needs {requested} complex entries, budget is {budget}")]
    Budget { requested: usize, budget: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
