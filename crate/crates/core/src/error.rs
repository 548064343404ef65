use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("instance strings must be non-empty")]
    EmptyString,
    #[error("strings have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("strings are not related: symbol {symbol:?} occurs {count1} times in s1 and {count2} times in s2")]
    NotRelated {
        symbol: char,
        count1: usize,
        count2: usize,
    },
    #[error("invalid symbol {0:?}: only printable non-whitespace characters are allowed")]
    InvalidSymbol(char),
    #[error("malformed instance text: {0}")]
    Format(String),
    #[error("block index {index} out of range for a block set of size {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("block (k1={k1}, k2={k2}, len={len}) is not a common block of the instance")]
    NotACommonBlock { k1: usize, k2: usize, len: usize },
    #[error("block set is empty")]
    EmptyBlockSet,
    #[error("minimum block length {l} is outside the admissible range [{min}, {max}]")]
    LengthOutOfRange { l: usize, min: usize, max: usize },
    #[error("forced blocks overlap")]
    ForcedOverlap,
    #[error("forced block (k1={k1}, k2={k2}, len={len}) is not part of the block set")]
    ForcedNotInSet { k1: usize, k2: usize, len: usize },
    #[error("weight constant C={c} must be at least n+1={min}")]
    WeightTooSmall { c: i64, min: i64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("model is infeasible over the given block set")]
    Infeasible,
    #[error("instance of length {n} is too large for exhaustive search (limit {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("alphabet must be non-empty")]
    EmptyAlphabet,
    #[error("instance length must be at least 1")]
    ZeroLength,
    #[error("LP parse error on line {line}: {msg}")]
    LpParse { line: usize, msg: String },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable {name:?} has non-binary value {value}")]
    NonBinaryValue { name: String, value: String },
    #[error("assignment violates constraint {0:?}")]
    ConstraintViolation(String),
    #[error("solution is not a valid partition: {0}")]
    InvalidSolution(String),
}
