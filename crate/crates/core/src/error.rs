use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("enumeration cap exceeded: {required} committees, cap is {cap}")]
    CapExceeded { required: u128, cap: u128 },

    #[error("materialization budget exceeded: needs {required}, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("lp solver: {0}")]
    Solver(String),

    #[error("lp solver hit its iteration limit ({0} pivots)")]
    IterationLimit(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
