use thiserror::Error;

use crate::formula::Var;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("sort error: {0}")]
    Sort(String),
    #[error("mode error: {0}")]
    Mode(String),
    #[error("formula contains a quantifier where a quantifier-free formula is required")]
    QuantifiedInput,
    #[error("substituted term mentions {0}, which is bound in the target formula")]
    Capture(Var),
    #[error("variable {0} has no value in the assignment")]
    UnboundVariable(Var),
    #[error("variable {0} must be ground but is unbound")]
    NotGround(Var),
    #[error("expected a conjunction of literals")]
    NotConjunction,
    #[error("sentence expected, found free variables: {0}")]
    FreeVariable(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("formula does not define a function: {0}")]
    NotFunctional(String),
    #[error("residual domain of the coded function is infinite")]
    InfiniteResidual,
    #[error("scalar overflow in the chosen coefficient type")]
    Overflow,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Coarse classification of [`Error`], used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// The input text or its sorts/mode are wrong.
    Input,
    /// The input is well formed but violates an operation's precondition.
    Precondition,
    /// A broken internal invariant. Always a bug.
    Internal,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. } | Error::Sort(_) | Error::Mode(_) => ErrorClass::Input,
            Error::InfiniteResidual | Error::Internal(_) => ErrorClass::Internal,
            _ => ErrorClass::Precondition,
        }
    }

    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse { position, message: message.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
