use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variable(s): {}", .0.join(", "))]
    UnknownVariables(Vec<String>),

    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),

    #[error("variable index {0} out of range for a domain of {1} variables")]
    IndexOutOfRange(usize, usize),

    #[error("variable sets overlap: {0}")]
    Overlap(String),

    #[error("empty variable set: {0}")]
    EmptySet(&'static str),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("matrix is not positive definite ({0})")]
    NotPositiveDefinite(String),

    #[error("conditioning event has zero probability")]
    ZeroProbabilityEvent,

    #[error("cannot condition on every variable of the model")]
    ConditionOnAll,

    #[error("unsupported independence query: {0}")]
    UnsupportedQuery(String),

    #[error("data test needs singleton variables, got |x|={0}, |y|={1}")]
    SetValuedDataQuery(usize, usize),

    #[error("operation requires an exact model oracle")]
    NotExact,

    #[error("domain too large: {size} exceeds the limit of {limit}")]
    DomainTooLarge { size: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("self-check failed: {0}")]
    SelfCheck(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
