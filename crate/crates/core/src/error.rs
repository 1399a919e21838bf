use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected} variables, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("not divisible by {p}: coefficient {coefficient} has valuation 0 or less")]
    NotDivisible { p: u64, coefficient: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("ghost vector is not in the image of the ghost map (component {index})")]
    NotInImage { index: usize },

    #[error("invalid Frobenius lift: {0}")]
    InvalidLift(String),

    #[error("ring map does not commute with the Frobenius lifts on generator {generator}")]
    FrobeniusMismatch { generator: String },

    #[error("complex is not saturated")]
    NotSaturated,

    #[error("no stabilization after {iterations} iterations")]
    IterationLimit { iterations: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("spanning set of {size} generators exceeds the budget of {budget}")]
    SpanOverflow { size: usize, budget: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
