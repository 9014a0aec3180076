use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("noise scale must be positive and finite, got {0}")]
    InvalidNoiseScale(f64),

    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("delta must lie in [0, 1), got {0}")]
    InvalidDelta(f64),

    #[error("sensitivity must be non-negative and finite, got {0}")]
    InvalidSensitivity(f64),

    #[error("invalid domain: lower bound {lower} must be strictly below upper bound {upper}")]
    InvalidDomain { lower: f64, upper: f64 },

    #[error("invalid output range [{lo}, {hi}]")]
    InvalidRange { lo: f64, hi: f64 },

    #[error("{mechanism} mechanism cannot be used with delta = {delta}")]
    WrongMechanism { mechanism: &'static str, delta: f64 },

    #[error("the column is empty")]
    EmptyColumn,

    #[error("query requires at least {required} rows, got {actual}")]
    NotEnoughRows { required: usize, actual: usize },

    #[error("query bounds were not resolved before execution")]
    UnresolvedBounds,

    #[error("randomized response takes a single bit, got {0}")]
    NonBinaryInput(u8),

    #[error("exponential mechanism needs at least one candidate")]
    NoCandidates,

    #[error("{candidates} candidates but {utilities} utilities")]
    LengthMismatch { candidates: usize, utilities: usize },

    #[error("brute-force enumeration of {0} datasets exceeds the limit")]
    InfeasibleEnumeration(u128),

    #[error("privacy budget exhausted: requested {requested}, remaining {remaining}")]
    BudgetExhausted { requested: f64, remaining: f64 },

    #[error("true value is zero; scaled error metrics are undefined")]
    TrueValueZero,

    #[error("no results to score")]
    EmptyResults,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
