use thiserror::Error;

/// Errors raised by the library. The CLI maps every variant to exit code 1,
/// invariant failures are reported separately and never surface here.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {vertex} out of range (digraph has {n_vertices} vertices)")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("self-loop at vertex {0} (self-loops are disabled)")]
    SelfLoop(usize),

    #[error("digraph is disconnected")]
    Disconnected,

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("form is not in the requested subspace (residual {residual:.3e})")]
    NotInSubspace { residual: f64 },

    #[error("form is not closed (‖df‖ = {residual:.3e})")]
    NotClosed { residual: f64 },

    #[error("path {path:?} of dimension {dim} is not allowed")]
    NotAllowed { path: Vec<usize>, dim: usize },

    #[error("allowed {dim}-path {path:?} has valence 0; the walk is undefined")]
    ZeroValence { path: Vec<usize>, dim: usize },

    #[error("laziness {0} outside [0, 1]")]
    InvalidLaziness(f64),

    #[error("transition operator has eigenvalue {0} of modulus ≥ 1 off the kernel; powers do not converge")]
    NonConvergent(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance exceeds the oracle cap: {0}")]
    OracleCap(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
