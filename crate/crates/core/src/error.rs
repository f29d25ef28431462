use thiserror::Error;

/// Errors produced by the evaluators, solvers and scanners.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} must be positive, got {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("inadmissible material: {0}")]
    Inadmissible(String),

    #[error("step size underflow at t = {at} (last good state {state:?})")]
    StepUnderflow { at: f64, state: Vec<f64> },

    #[error("step budget of {steps} exhausted at t = {at}")]
    TooManySteps { at: f64, steps: usize },

    #[error("wall-clock budget exhausted at t = {at}")]
    Timeout { at: f64 },

    #[error("no sign change of the existence predicate between {lo} and {hi}")]
    NoBracket { lo: f64, hi: f64 },

    #[error("deformation map is not monotone: {0}")]
    NotMonotone(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(what: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain { what, value })
    }
}
