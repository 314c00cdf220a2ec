use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("points {0} and {1} anticommute; beta is undefined")]
    Anticommuting(String, String),

    #[error("{what} supports at most {limit} qubits, got {n}")]
    TooManyQubits { what: &'static str, n: usize, limit: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("point is outside the polytope (min slack {0})")]
    OutsidePolytope(f64),

    #[error("invalid local value assignment: violated on ({0}, {1})")]
    InvalidAssignment(String, String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("iteration cap of {0} reached")]
    IterationCap(usize),

    #[error("resource guard exceeded: {0}")]
    ResourceGuard(String),

    #[error("unsupported phase space {name} for n = {n}")]
    UnsupportedCatalog { name: String, n: usize },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
