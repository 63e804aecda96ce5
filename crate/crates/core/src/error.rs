use thiserror::Error;

use crate::pam::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero has no p-adic weight")]
    ZeroHasNoWeight,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime basis must contain at least one prime")]
    EmptyBasis,
    #[error("enumeration of {size} candidates exceeds the cap of {cap}")]
    EnumerationTooLarge { size: String, cap: u64 },
    #[error("cannot factor {0} within the trial-division bound")]
    UnfactorableCoefficient(String),
    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),
    #[error("empty interval [{left}, {right})")]
    EmptyInterval { left: String, right: String },

    #[error("point {0} lies outside the map domain")]
    PointOutsideDomain(String),
    #[error("point {0} is not covered by any piece")]
    PointInCoverageGap(String),
    #[error("operation requires a deterministic map")]
    NotDeterministic,
    #[error("piece {piece} has slope zero")]
    SlopeZero { piece: usize },
    #[error("affine conjugacy needs a nonzero scale factor")]
    DegenerateConjugacy,

    #[error("coefficient matrix has a row with mixed signs")]
    SignConditionViolated,
    #[error("map is not injective")]
    NotInjective,
    #[error("map must have exactly two pieces, found {0}")]
    NotTwoPieces(usize),
    #[error("density bounds must satisfy 0 < kmin <= kmax")]
    BadDensityBounds,

    #[error("base must not be an integer")]
    IntegerBase,
    #[error("base must be greater than one")]
    BaseNotGreaterThanOne,
    #[error("base must be a rational non-integer greater than one")]
    BaseOutOfRange,
    #[error("digit streams need a deterministic (greedy or lazy) variant")]
    NondeterministicVariant,
    #[error("requested {requested} digits but only {available} are available")]
    DigitsExhausted { requested: usize, available: usize },

    #[error("alpha truncation index {0} is not representable (allowed 1..=4)")]
    PrecisionOverflow(u32),
    #[error("scan range {n_max} exceeds Delta_i = {delta}")]
    RangeExceedsDelta { n_max: u64, delta: u64 },
    #[error("n = {n} exceeds the cap {cap}")]
    CapExceeded { n: u64, cap: u64 },

    #[error("syntax error at {location}: {message}")]
    Syntax { location: String, message: String },
    #[error("map failed validation: {0}")]
    ValidationFailed(ValidationReport),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("missing required flag --{0}")]
    MissingArgument(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
