use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("monomial {0} lies outside the truncation window")]
    OutsideTruncation(String),

    #[error("exponential of a series with non-nilpotent constant term {0}")]
    NotNilpotent(String),

    #[error("series has no invertible constant term")]
    NotInvertible,

    #[error("commutator series did not terminate after {0} steps")]
    NoNilpotency(usize),

    #[error("z-window [{min}, {max}] is insufficient: {reason}")]
    WindowInsufficient { min: i32, max: i32, reason: String },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("N-exponent {exponent} violates the expected grading ({expected})")]
    Grading { exponent: String, expected: String },

    #[error("cannot evaluate at N = {n}: {reason}")]
    Evaluation { n: u32, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
