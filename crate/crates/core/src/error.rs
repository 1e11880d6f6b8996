use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("negative radius {0}")]
    NegativeRadius(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("need at least {needed} points, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{0}")]
    InvalidMap(String),
    #[error("unknown map archetype `{0}`")]
    UnknownArchetype(String),
    #[error("degenerate knot: keypoints {0} and {next} coincide", next = .0 + 1)]
    DegenerateKnot(usize),
    #[error("free space not sampleable")]
    FreeSpaceNotSampleable,
    #[error("start point is in collision")]
    StartInCollision,
    #[error("goal point is in collision")]
    GoalInCollision,
    #[error("start and goal coincide")]
    StartEqualsGoal,
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
