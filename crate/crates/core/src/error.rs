use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("exact independence number limited to {limit} vertices, got {n}; use the greedy bound explicitly")]
    TooLargeForExact { n: usize, limit: usize },
    #[error("digraph is not a tournament: {0}")]
    NotATournament(String),
    #[error("unsupported forbidden family: {0}")]
    UnsupportedFamily(String),
    #[error("pattern enumeration exceeded the copy budget of {limit}")]
    CopyBudgetExceeded { limit: usize },
    #[error("graph has {m} edges, more than the limit of {limit} for this method")]
    EdgeBudgetExceeded { m: usize, limit: usize },
    #[error("infeasible at desk scale: {0}")]
    Infeasible(String),
    #[error("orientation does not match the host graph: {0}")]
    OrientationMismatch(String),
    #[error("orientation violates the family: {0}")]
    OrientationViolatesFamily(String),
    #[error("propagation could not recover the orientation at vertex {vertex}")]
    PropagationStuck { vertex: usize },
    #[error("sandwich violation: {0}")]
    SandwichViolation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
