use thiserror::Error;

use crate::network::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    Validation(ValidationReport),

    #[error("linear system is singular ({context})")]
    SingularSystem { context: &'static str },

    #[error("cycle enumeration exceeded the budget of {cap} cycles")]
    CycleBudgetExceeded { cap: usize },

    #[error("network is not a star topology")]
    NotStar,

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("condition {condition} does not apply: {reason}")]
    WrongTopology { condition: String, reason: String },

    #[error("susceptibilities are not homogeneous")]
    NotHomogeneous,

    #[error("no start converged within {max_iter} iterations")]
    NoConvergence { max_iter: usize },

    #[error("agent {} read data outside its local view (node {})", .agent + 1, .foreign + 1)]
    ViewViolation { agent: usize, foreign: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("box must be bounded to draw samples (coordinate {0})")]
    UnboundedBox(usize),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
