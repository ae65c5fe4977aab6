use thiserror::Error;

/// Errors raised by the library operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("natural number must be positive")]
    ZeroNatural,
    #[error("row {row} is not non-mixing: expected exactly one nonzero entry, found {nonzero}")]
    NotNonMixing { row: usize, nonzero: usize },
    #[error("entry at row {row}, column {column} is negative")]
    NotPositive { row: usize, column: usize },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("vector is not an order-unit (all entries must be at least 1)")]
    NotOrderUnit,
    #[error("level {level} is out of range (presented levels: {available})")]
    LevelOutOfRange { level: usize, available: usize },
    #[error("level list must be strictly ascending and start at level 1")]
    NonAscending,
    #[error("level {level} has no surviving coordinates")]
    EmptyLevel { level: usize },
    #[error("map is not normalized: it does not send the source unit to the target unit")]
    NotNormalized,
    #[error("sequence is not injective")]
    NotInjective,
    #[error("invalid periodic tail: {0}")]
    BadRepeat(String),
    #[error("invalid supernatural literal: {0}")]
    BadSupernatural(String),
}

pub type Result<T> = std::result::Result<T, Error>;
