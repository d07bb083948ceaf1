use thiserror::Error;

use crate::ordinal::Ordinal;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("{0} requires a nonzero ordinal")]
    ZeroOrdinal(&'static str),

    #[error("{0} is not a limit ordinal")]
    NotLimit(Ordinal),

    #[error("invalid finite set: {0}")]
    InvalidSet(String),

    #[error("budget of {budget} exceeded after {count} items")]
    BudgetExceeded { budget: usize, count: usize },

    #[error("stream exhausted before {0}")]
    StreamExhausted(String),

    #[error("family `{0}` has no tail oracle usable at this stage")]
    MissingTailOracle(String),

    #[error("parts do not form a partition: {0}")]
    NotAPartition(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        Error::Syntax { pos, msg: msg.into() }
    }
}
