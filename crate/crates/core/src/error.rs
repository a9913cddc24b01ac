use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input or mismatched dimensions.
    #[error("input error: {0}")]
    Input(String),

    #[error("unsupported cone: {0}")]
    UnsupportedCone(String),

    /// The degree functional is not strictly positive on the cone.
    #[error("grading error: {0}")]
    Grading(String),

    #[error("hilbert basis incomplete: {0}")]
    Incomplete(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("unsupported input: {0}")]
    UnsupportedInput(String),

    #[error("undefined invariant: {0}")]
    UndefinedInvariant(String),

    #[error("component rule incomplete: {0}")]
    IncompleteRule(String),

    #[error("divergent prediction: {0}")]
    DivergentPrediction(String),

    #[error("table inconsistency: {0}")]
    TableInconsistency(String),

    #[error("query error: {0}")]
    Query(String),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
