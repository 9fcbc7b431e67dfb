use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("beat sequence is empty")]
    EmptySequence,
    #[error("beat {index} at {time}s is earlier than its predecessor")]
    NonMonotonic { index: usize, time: f64 },
    #[error("beat {index} has negative time {time}s")]
    NegativeTime { index: usize, time: f64 },
    #[error("beat {index} is not a finite number")]
    NonFinite { index: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("window needs at least 2 times to define an inter-beat interval")]
    WindowTooShort,
    #[error("need at least {needed} beats, got {got}")]
    TooFewBeats { needed: usize, got: usize },
    #[error("beat period of {period_frames:.3} frames is below 2 frames")]
    DegenerateTempo { period_frames: f64 },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: missing `fps=<value>` header")]
    MissingFps { path: String },
    #[error("{path}:{line}: activation value {value} outside [0, 1]")]
    ValueOutOfRange {
        path: String,
        line: usize,
        value: f64,
    },
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("no reference/estimate pairs found")]
    NoPairsFound,
    #[error("two files share the stem `{stem}` in {}", dir.display())]
    StemCollision { stem: String, dir: PathBuf },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
