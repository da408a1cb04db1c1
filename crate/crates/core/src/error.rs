use thiserror::Error;

/// Every failure the toolkit reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("agent {agent}: {reason}")]
    Infeasible { agent: usize, reason: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("capacity arithmetic overflowed")]
    Overflow,

    #[error("enumeration refused: {count} items exceeds the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("equilibrium audit failed: {check}: {detail}")]
    AuditViolation { check: String, detail: String },

    #[error("malformed input: {0}")]
    Format(String),

    #[error("trace rejected at move {index}: {reason}")]
    Trace { index: usize, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn infeasible(agent: usize, reason: impl Into<String>) -> Self {
        Error::Infeasible {
            agent,
            reason: reason.into(),
        }
    }
}
