use thiserror::Error;

/// Errors raised by field construction and the normal-basis machinery.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),

    #[error("tower layer {layer} is not Eisenstein: {reason}")]
    NotEisenstein { layer: usize, reason: String },

    #[error("division by an element that vanishes to precision {precision:?}")]
    DivisionByZero { precision: Option<i64> },

    #[error("layer {layer} is invalid: {reason}")]
    InvalidLayer { layer: usize, reason: String },

    #[error("layers are dependent: {relation}")]
    DependentLayers { relation: String },

    #[error("extension is not totally ramified: {reason}")]
    NotTotallyRamified { reason: String },

    /// A decision needed more digits than the current working precision.
    #[error("inconclusive at precision {precision}: {what}")]
    Inconclusive { precision: i64, what: String },

    /// An identity that must hold did not; indicates a bug or a bad scenario.
    #[error("structural failure: {0}")]
    Structural(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("scenario error: {0}")]
    Scenario(String),
}

impl Error {
    pub fn inconclusive(precision: i64, what: impl Into<String>) -> Self {
        Error::Inconclusive { precision, what: what.into() }
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Error::Inconclusive { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status: 1 for a violated identity, 2 for a precision
    /// cap, 3 for unusable input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Structural(_) => 1,
            Error::Inconclusive { .. } => 2,
            _ => 3,
        }
    }
}
