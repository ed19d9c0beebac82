use thiserror::Error;

/// Errors raised by sequence construction, queries and surgery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input sequence is empty")]
    EmptyInput,
    #[error("value at index {index} is not comparable with the other values")]
    UnorderedValue { index: usize },
    #[error("level {level} is outside the universe of {size} levels")]
    LevelOutOfRange { level: u32, size: u32 },
    #[error("universe must contain at least one level")]
    EmptyUniverse,
    #[error("labels must be strictly increasing and match the universe size")]
    InvalidLabels,
    #[error("bars carry no numeric labels")]
    NonNumericLabels,
    #[error("index {index} does not lie inside a monotone box")]
    IndexNotInMonotone { index: usize },
    #[error("setting index {index} to level {level} would break the monotone box")]
    EditViolatesMonotonicity { index: usize, level: u32 },
    #[error("cut position {position} is out of range for a sequence of length {len}")]
    CutOutOfRange { position: usize, len: usize },
    #[error("cut would leave an empty piece")]
    EmptyPiece,
    #[error("pieces do not share a compatible level universe")]
    IncompatibleUniverses,
    #[error("shift of {shift} samples exceeds window length {len}")]
    ShiftTooLong { shift: usize, len: usize },
    #[error("operation requires a {expected} domain")]
    WrongDomain { expected: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;
