use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("word ends in x: {0}")]
    WordEndsInX(String),
    #[error("series is not a unit: {0}")]
    NotAUnit(String),
    #[error("cannot truncate to order {requested}: series only known to order {known}")]
    TruncationBeyondOrder { requested: i64, known: i64 },
    #[error("statement is not weighted: {0}")]
    NotWeighted(String),
    #[error("modulus p^{modulus} exceeds series order {order}")]
    InsufficientOrder { modulus: i64, order: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("work budget of {budget} exceeded ({needed} needed)")]
    WorkBudget { budget: u64, needed: u64 },
    #[error("quantity has no exact rational value: {0}")]
    NotRational(String),
}
