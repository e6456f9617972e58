use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong in the library.
///
/// Variants split into parameter errors (bad arguments, malformed files) and
/// precondition violations (valid arguments describing an object the
/// operation is not defined for). [`Error::is_precondition`] tells them apart.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("vertex {vertex} out of range for a graph with {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),

    #[error("adjacency is not symmetric: {0} lists {1} but not vice versa")]
    Asymmetric(usize, usize),

    #[error("vertex {0} is isolated; the normalized operators divide by its degree")]
    IsolatedVertex(usize),

    #[error("dimension mismatch: {op} on {left:?} and {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("index ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is {rows}x{cols}; dense routines accept at most {limit} rows and columns")]
    TooLarge {
        rows: usize,
        cols: usize,
        limit: usize,
    },

    #[error("no simple {d}-regular graph on {n} vertices: {reason}")]
    InfeasibleRegular { n: usize, d: usize, reason: String },

    #[error("random generator gave up after {attempts} restarts")]
    RejectionBudgetExceeded { attempts: usize },

    #[error("edge-addition condition ({condition}) violated at vertices {vertices:?}")]
    ConditionViolation {
        condition: &'static str,
        vertices: Vec<usize>,
    },

    #[error("edge {0}-{1} cannot be added in any phase: its endpoints are at distance 2")]
    EdgeNotAddable(usize, usize),

    #[error("graph is not a supergraph: edge {0}-{1} is missing from the larger graph")]
    NotSupergraph(usize, usize),

    #[error("graph is not regular: vertex {vertex} has degree {degree}, expected {expected}")]
    NotRegular {
        vertex: usize,
        degree: usize,
        expected: usize,
    },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("vertex {0} has no level label")]
    MissingLevel(usize),

    #[error("matrix is not a 0/1 matrix with {d} ones per row and column: {reason}")]
    NotRegularZeroOne { d: usize, reason: String },

    #[error("no perfect matching found at round {round}")]
    MatchingNotFound { round: usize },

    #[error("search space too large: {0}")]
    SearchTooLarge(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors describing an input the operation is not defined on,
    /// as opposed to malformed arguments or files.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParameter { .. } | Error::Parse { .. } | Error::TooLarge { .. }
        )
    }
}
