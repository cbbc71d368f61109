use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("unsupported size {n}, expected {range}")]
    Size { n: usize, range: &'static str },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("tree is not full*: {0}")]
    NotFullStar(String),
    #[error("forbidden point t = {0}")]
    Forbidden(f64),
    #[error("orbit left [0, 1] with t = {0}")]
    Escaped(f64),
    #[error("inadmissible orbit: {0}")]
    Inadmissible(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("count overflows u128")]
    Overflow,
}

impl Error {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::OutOfRange { .. } => 2,
            Error::Size { .. } | Error::Overflow => 3,
            Error::Hypothesis(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
