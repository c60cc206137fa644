use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree {0} is outside 1..=8")]
    DegreeOutOfRange(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("field element code {code} is out of range for q = {q}")]
    BadElement { code: u64, q: u32 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("computation exceeds the feasibility guard: {0}")]
    TooLarge(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("relation is not in Rel^inf (codomain projection is not surjective)")]
    NotRelInfty,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("cannot parse scalar `{0}`")]
    ScalarParse(String),
    #[error("term uses the unit eps but the target has none")]
    MissingUnit,
    #[error("t must be given a value for this operation")]
    RequiresEvaluation,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
