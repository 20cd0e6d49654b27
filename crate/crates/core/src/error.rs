use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: no UID column in header", file.display())]
    MissingUidColumn { file: PathBuf },

    #[error("duplicate fact uid {uid:?} at {first} and {second}")]
    DuplicateUid {
        uid: String,
        first: String,
        second: String,
    },

    #[error("{}:{line}: row has no content text", file.display())]
    EmptyFactText { file: PathBuf, line: usize },

    #[error("no facts found in {}", .0.display())]
    EmptyStore(PathBuf),

    #[error("cannot fit on an empty corpus")]
    EmptyCorpus,

    #[error("scale factor must be non-negative, got {0}")]
    NegativeScale(f64),

    #[error("vector weights must be finite and non-negative, got {0}")]
    InvalidWeight(f64),

    #[error("{what} {} not found", path.display())]
    MissingPath { what: &'static str, path: PathBuf },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("rankings for {qid} cover different facts ({detail})")]
    MismatchedRankings { qid: String, detail: String },

    #[error("question sets differ: only in first {only_first:?}, only in other {only_other:?}")]
    QuestionSetMismatch {
        only_first: Vec<String>,
        only_other: Vec<String>,
    },

    #[error("missing external scores for {qid}: {uids:?}")]
    MissingScores { qid: String, uids: Vec<String> },

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(file: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by bad parameters rather than bad data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidConfig(_) | Error::NegativeScale(_))
    }
}
