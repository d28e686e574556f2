use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    /// Argument outside the domain of a formula or operator.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameter regime about which no theorem makes a statement.
    #[error("not covered: {0}")]
    NotCovered(String),

    /// Hypothesis of an operation fails for the given inputs.
    #[error("inapplicable: {0}")]
    Inapplicable(String),

    /// Requested path is not implemented for these inputs (e.g. dimension).
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    /// Process exit status used by the CLI: 2 when the inputs fall outside a
    /// hypothesis, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Domain(_) | LabError::NotCovered(_) | LabError::Inapplicable(_) => 2,
            _ => 1,
        }
    }
}
