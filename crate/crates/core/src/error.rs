use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("evaluation point t = {t} hits the real pole c = {c}")]
    PoleHit { t: f64, c: f64 },
    #[error("invalid pole: {0}")]
    InvalidPole(String),
    #[error("invalid angle alpha = {0}: must lie in (-pi, pi) and differ from 0")]
    InvalidAngle(f64),
    #[error("index out of range: k = {k} exceeds m = {m}")]
    IndexRange { m: u32, k: u32 },
    #[error("kernel has a positive-real pole at term {0}")]
    RealPolePresent(usize),
    #[error("branch violation: arg(-c) = +-pi for c = {0}")]
    BranchViolation(String),
    #[error("quadrature failure: error estimate {estimate:e} exceeds {limit:e}")]
    QuadratureFailure { estimate: f64, limit: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("inadmissible kernel: {0}")]
    Inadmissible(String),
    #[error("dimension mismatch: expected {expected}x{expected}, found {found}x{found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("analyticity violation: {0}")]
    AnalyticityViolation(String),
    #[error("unsupported multiplicity m = {0}")]
    UnsupportedMultiplicity(u32),
    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),
    #[error("symbol is not elliptic: min |det| = {0:e}")]
    NotElliptic(f64),
    #[error("argument refinement exhausted at depth {0}")]
    RefinementExhausted(u32),
    #[error("window leakage: boundary magnitude {0:e} above 1e-8")]
    WindowLeakage(f64),
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),
    #[error("finite section is numerically singular (cond = {0:e})")]
    SingularSection(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
