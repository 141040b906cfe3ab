use thiserror::Error;

/// Errors raised by the evaluators, solvers and file parsers in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("zero variance: the subset sum is constant")]
    ZeroVariance,
    #[error("degenerate solution: all coefficients and the gaussian weight are zero")]
    DegenerateSolution,
    #[error("plan exceeds the digging budget: needs {needed}, budget {budget}")]
    OverBudget { needed: String, budget: String },
    #[error("invalid dig plan: {0}")]
    InvalidPlan(String),
    #[error("guard violated: {0}")]
    Guard(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
