use thiserror::Error;

/// Errors raised by construction, evaluation and transformation routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("budget exceeded: {what} (limit {limit})")]
    BudgetExceeded { what: &'static str, limit: usize },
    #[error("structural error: {0}")]
    Structure(String),
    #[error("total degree {degree} exceeds the identity-testing safety bound {limit}")]
    DegreeTooLarge { degree: u64, limit: u64 },
    #[error("circuit is not multiplicatively disjoint at gate {0}")]
    NotMultiplicativelyDisjoint(usize),
    #[error("expected at most one stack symbol, found {0}")]
    TooManySymbols(usize),
    #[error("program has no layering")]
    NotLayered,
    #[error("assignment covers {got} variables but X{needed} is referenced")]
    Assignment { got: usize, needed: usize },
    #[error("{0}")]
    Invalid(String),
    #[error("format error at {path}: {message}")]
    Format { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }

    pub(crate) fn format(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}
