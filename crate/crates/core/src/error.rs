use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the domain of an operation (bad modulus, non-unit, wrong group shape...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural fact about the groups failed to hold at runtime.
    #[error("theory violation: {0}")]
    TheoryViolation(String),

    #[error("size bound exceeded: {what} = {value} exceeds {limit}")]
    BoundExceeded {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    /// The solver could not produce an answer (inconsistent oracle, unexpected index).
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// Every Fourier-sampling round measured `c = 0`, including the retry batch.
    #[error("all {rounds} rounds failed")]
    AllRoundsFailed { rounds: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn theory(msg: impl Into<String>) -> Self {
        Error::TheoryViolation(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::TheoryViolation(_) => 2,
            _ => 1,
        }
    }
}
