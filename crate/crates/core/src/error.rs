use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("lookup on an empty tree")]
    EmptyTree,
    #[error("lookup on an empty list")]
    EmptyList,
    #[error("mark is stale: an older mark was undone past it or it was released")]
    StaleMark,
    #[error("rebase requires a depth-annotated tree")]
    NeedsDepthAnnotation,
    #[error("bad configuration: {0}")]
    BadConfig(String),
    #[error("bad arguments: {0}")]
    BadArgs(String),
    #[error("cannot parse term at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
