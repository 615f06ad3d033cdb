use std::path::PathBuf;

/// Library error type. Variants map onto the CLI's greppable error classes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed or unsupported file content.
    #[error("{0}")]
    Format(String),
    /// Shape disagreement between two inputs (image dims, plane sizes).
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// Numerically unusable data: singular maps, rank-deficient systems,
    /// empty output extents.
    #[error("degenerate: {0}")]
    Degenerate(String),
    /// A contract violation in how the library was called.
    #[error("{0}")]
    InvalidArg(String),
    /// Projective denominator vanished at a target pixel.
    #[error("point at infinity at target pixel ({row}, {col})")]
    PointAtInfinity { row: usize, col: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArg(msg.into())
    }

    pub fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
