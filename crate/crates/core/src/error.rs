use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("degenerate state: popcount {popcount} of {len} (empty or full subset, or proportional to the all-ones vector)")]
    DegenerateState { popcount: usize, len: usize },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid subsystem mask: {0}")]
    InvalidMask(String),

    #[error("subsystem must be a proper nonempty subset of the point set")]
    TrivialSubsystem,

    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("operation requires a state in the {expected} basis")]
    BasisMismatch { expected: &'static str },

    #[error("value outside of domain: {0}")]
    DomainError(String),

    #[error("alpha = {0} is too close to 1; use the von Neumann entropy")]
    AlphaOne(f64),

    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("not a unit vector (squared norm {0})")]
    NotNormalized(f64),

    #[error("state has a component along the all-ones vector ({0:e})")]
    NotStandard(f64),

    #[error("empty input")]
    EmptyInput,

    #[error("time range leaves one period of the generator; pass allow_wrap to permit it")]
    WrapNotAllowed,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numeric invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    /// True for errors that indicate a numeric invariant failed at run time
    /// (as opposed to bad input).
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::InvariantViolation(_)
                | Error::NotHermitian(_)
                | Error::NotPositive(_)
                | Error::InvalidTrace(_)
                | Error::NotNormalized(_)
                | Error::NotStandard(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
