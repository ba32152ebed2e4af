use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported field size q = {0}")]
    UnsupportedField(u32),
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("not invertible")]
    NotInvertible,
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("element is not in the Iwahori subgroup")]
    NotInIwahori,
    #[error("folding stuck: {0}")]
    FoldingStuck(String),
    #[error("cell classification unavailable: {0}")]
    UnsupportedCell(String),
    #[error("cocharacter is not antidominant")]
    NotAntiDominant,
    #[error("element is not K_m-bi-invariant")]
    NotKmInvariant,
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("conductor too large for the available level: {0}")]
    ConductorTooLarge(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<crate::exactalg::SeriesError> for Error {
    fn from(e: crate::exactalg::SeriesError) -> Self {
        match e {
            crate::exactalg::SeriesError::NotInvertible => Error::NotInvertible,
            crate::exactalg::SeriesError::PrecisionExhausted(s) => Error::InsufficientPrecision(s),
        }
    }
}
