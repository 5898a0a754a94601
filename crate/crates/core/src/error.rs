use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("operation needs at least one argument")]
    EmptyArguments,

    #[error("invalid bitstring {0:?}")]
    InvalidBitstring(String),

    #[error("vector length {0} outside 1..=64")]
    UnsupportedLength(usize),

    #[error("parity constraint: n = {0} must be even")]
    OddDimension(usize),

    #[error("n = {n} outside the feasible range {min}..={max}")]
    Infeasible { n: usize, min: usize, max: usize },

    #[error("odd parity required: {0}")]
    OddParityRequired(String),

    #[error("even parity required: {0}")]
    EvenParityRequired(String),

    #[error("inputs {x} and {y} are not admissible")]
    Inadmissible { x: String, y: String },

    #[error("matrix is not orthogonal")]
    NotOrthogonal,

    #[error("{what} = {value} outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: String,
        min: String,
        max: String,
    },

    #[error("invalid settings: {0}")]
    Settings(String),

    #[error("component index {index} outside 1..={n}")]
    ComponentIndex { index: usize, n: usize },

    #[error("cover construction failed: {0}")]
    Structure(String),

    #[error("line {line}: {message}")]
    FixtureParse { line: usize, message: String },

    #[error("fixture check failed: {0}")]
    Fixture(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
