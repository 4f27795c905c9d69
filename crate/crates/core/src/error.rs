use std::path::PathBuf;

/// Why a pattern or grid file failed to parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// A line that is not a list of decimal integers.
    Malformed,
    /// A point line with the wrong number of coordinates.
    WrongArity { expected: usize, found: usize },
    /// Fewer than three points declared or listed.
    TooFewPoints(usize),
    /// The same point appears twice.
    DuplicatePoint,
    /// The header promised a different number of point lines.
    CountMismatch { declared: usize, found: usize },
    /// A coordinate outside of the declared grid.
    OutOfRange,
    /// The input ended before a header line was seen.
    MissingHeader,
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseErrorKind::Malformed => write!(f, "malformed line"),
            ParseErrorKind::WrongArity { expected, found } => {
                write!(f, "wrong arity: expected {expected} coordinates, found {found}")
            }
            ParseErrorKind::TooFewPoints(k) => {
                write!(f, "fewer than 3 points ({k})")
            }
            ParseErrorKind::DuplicatePoint => write!(f, "duplicate point"),
            ParseErrorKind::CountMismatch { declared, found } => {
                write!(f, "header declares {declared} points but {found} were listed")
            }
            ParseErrorKind::OutOfRange => write!(f, "coordinate outside the grid"),
            ParseErrorKind::MissingHeader => write!(f, "missing header line"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {what} (cap {cap})")]
    Budget { what: &'static str, cap: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no value available for n = {0}")]
    ProviderMiss(u64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, kind: ParseErrorKind) -> Self {
        Error::Parse { line, kind }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit status used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 65,
            Error::Precondition(_) | Error::ProviderMiss(_) | Error::InvalidArgument(_) => 2,
            Error::Budget { .. } => 3,
            Error::Io { .. } => 74,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
