use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 8")]
    BadGrid(usize),
    #[error("field sizes differ: {0} vs {1}")]
    GridMismatch(usize, usize),
    #[error("weight too close to zero (min |w| = {0:e})")]
    DegenerateWeight(f64),
    #[error("bracket order n = {0} is not supported (n <= 3)")]
    BadOrder(usize),
    #[error("bad initial-data spec: {0}")]
    BadSpec(String),
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("blow-up detected at t = {t}: {reason}")]
    BlowupDetected { reason: String, t: f64 },
    #[error("markers crossed at t = {0}")]
    MarkerCrossing(f64),
    #[error("config: {0}")]
    Config(String),
    #[error("checkpoint {path}: {msg}")]
    Checkpoint { path: PathBuf, msg: String },
    #[error("writing {path}: {msg}")]
    Output { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
