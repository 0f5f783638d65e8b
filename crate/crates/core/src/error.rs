use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("operation requires a non-empty set")]
    EmptySet,
    #[error("axis index {index} out of range for dimension {dim}")]
    AxisOutOfRange { index: usize, dim: usize },
    #[error("point {point} has a negative coordinate; translate into the non-negative orthant first")]
    NegativeCoordinate { point: String },
    #[error("set is not a down-set (missing {missing})")]
    NotDownSet { missing: String },
    #[error("point {point} does not lie in {container}")]
    NotContained { point: String, container: String },
    #[error("progression is not {t}-proper")]
    NotProper { t: u64 },
    #[error("{what} needs {needed} steps, budget is {budget}")]
    BudgetExceeded { what: &'static str, needed: String, budget: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn budget(what: &'static str, needed: impl ToString, budget: impl ToString) -> Self {
        Error::BudgetExceeded { what, needed: needed.to_string(), budget: budget.to_string() }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
