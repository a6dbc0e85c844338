use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value encountered: {0}")]
    NonFiniteValue(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inapplicable: {0}")]
    Inapplicable(String),

    #[error("step underflow after {backtracks} rejected trials (last trial step {last_eta:e})")]
    StepUnderflow { backtracks: usize, last_eta: f64 },
}
