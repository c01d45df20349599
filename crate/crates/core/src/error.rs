use std::fmt;

/// Errors produced by graph loading, index construction, and queries.
#[derive(Debug)]
pub enum Error {
    /// Malformed input line in an edge list.
    Parse {
        line: usize,
        msg: String,
    },
    /// The input contained no edges.
    EmptyGraph,
    /// A node id is outside `[0, n)`.
    NodeOutOfRange {
        node: u64,
        n: usize,
    },
    /// A resource guard refused the operation (dense matrix, walk storage).
    CapExceeded {
        what: &'static str,
        needed: usize,
        cap: usize,
    },
    /// A parameter is outside its admissible range.
    InvalidParameter(String),
    /// A serialized index failed structural validation.
    Format(String),
    /// Checksum did not match the file contents.
    ChecksumMismatch,
    /// The index was built for a different graph.
    FingerprintMismatch {
        index: u64,
        graph: u64,
    },
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            Self::EmptyGraph => write!(f, "input graph has no edges"),
            Self::NodeOutOfRange { node, n } => {
                write!(f, "node {node} out of range (graph has {n} nodes)")
            }
            Self::CapExceeded { what, needed, cap } => {
                write!(f, "{what} needs {needed} but the configured cap is {cap}")
            }
            Self::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Self::Format(msg) => write!(f, "malformed index file: {msg}"),
            Self::ChecksumMismatch => write!(f, "index file checksum mismatch"),
            Self::FingerprintMismatch { index, graph } => write!(
                f,
                "index fingerprint {index:#018x} does not match graph fingerprint {graph:#018x}"
            ),
            Self::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Self::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
