use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("order atom `<` at {line}:{column} but order is not enabled")]
    OrderDisabled { line: usize, column: usize },
    #[error("formula is not existential: {0}")]
    NotExistential(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no value assigned to `{0}`")]
    MissingAssignment(String),
    #[error("unsupported profile: {0}")]
    UnsupportedProfile(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid element literal `{literal}`: {reason}")]
    InvalidLiteral { literal: String, reason: String },
    #[error("state space of {requested} exceeds the cap of {cap}")]
    CapExceeded { requested: u128, cap: u64 },
    #[error("disjunctive normal form exceeds the node limit of {0}")]
    DnfTooLarge(usize),
    #[error("polynomial {poly} has a root {root} in {profile}")]
    HasRoot {
        poly: String,
        root: String,
        profile: String,
    },
    #[error("rootless polynomial must be non-constant")]
    ConstantPolynomial,
    #[error("formula is not positive primitive: {0}")]
    NotPositivePrimitive(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("division by zero")]
    DivisionByZero,
}

pub type Result<T> = std::result::Result<T, Error>;
