use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite coordinate {0} in point")]
    NonFinite(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grid would hold more than {budget} nodes; coarsen the spacing or shrink the radius")]
    NodeBudgetExceeded { budget: usize },

    #[error("function is not proper (identically +inf)")]
    Improper,

    #[error("cone mismatch: {0} vs {1}")]
    ConeMismatch(String, String),

    #[error("point is not a member of {0}")]
    NotInCone(String),

    #[error("point already lies in the face; no separating vector exists")]
    InFace,

    #[error("rotation is not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("generator is not a nonzero boundary point of the cone")]
    BadGenerator,

    #[error("fast transform unavailable: {0}")]
    FastTransform(String),

    #[error("f(x) is +inf at node {0}")]
    InfiniteAt(usize),

    #[error("no interior probe nodes available")]
    NoInteriorProbes,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error(
        "normal-cone witness search failed after {restarts} restarts (best violation {best:e})"
    )]
    SearchFailed { restarts: usize, best: f64 },

    #[error("parse error near `{token}`: {msg}")]
    Parse { token: String, msg: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(token: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            msg: msg.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
