use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("family `{0}` divides by k and needs k > 0")]
    KZeroUnsupported(&'static str),

    #[error("t = {t} is outside the validity domain ({t_min}, {t_max}]")]
    OutOfDomain { t: f64, t_min: f64, t_max: f64 },

    #[error("alpha = {alpha} < 1 at t = {t}")]
    AlphaBelowOne { t: f64, alpha: f64 },

    #[error("quadrature did not converge on (0, {t}]: {reason}")]
    NonConvergence { t: f64, reason: String },

    #[error("coefficient function is not positive at t = {t} (value {value})")]
    NonPositive { t: f64, value: f64 },

    #[error("non-finite value {value} at t = {t}")]
    NonFinite { t: f64, value: f64 },

    #[error("beta = {beta} leaves (0, 1) at t = {t}")]
    BetaOutOfRange { t: f64, beta: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("negative value {value} near zero at t = {t}")]
    NegativeNearZero { t: f64, value: f64 },

    #[error("hypothesis mismatch: {0}")]
    HypothesisMismatch(String),

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("{count} sign changes on [{lo}, {hi}], expected exactly one")]
    MultipleSignChanges { lo: f64, hi: f64, count: usize },

    #[error("empty intersection of validity domains")]
    EmptyIntersection,

    #[error("condition check failed: {0}")]
    ConditionFailure(String),

    #[error("point (r = {r}, t = {t}) is outside the data window")]
    OutsideWindow { r: f64, t: f64 },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("table error: {0}")]
    Table(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
