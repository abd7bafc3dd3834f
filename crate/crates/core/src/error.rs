use thiserror::Error;

/// Errors raised by the library.
///
/// `is_invalid_input` separates caller mistakes from numerical trouble so
/// front ends can map them to distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point ({x}, {z}) is not in a sliding region")]
    NotSlidingRegion { x: f64, z: f64 },
    #[error("point ({x}, {z}) lies outside the closure of the sliding region")]
    OutsideSliding { x: f64, z: f64 },
    #[error("focus case: discriminant {0} is negative")]
    FocusCase(f64),
    #[error("degenerate two-fold: {0}")]
    Degenerate(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("step size underflow at t = {t} (state {state:?})")]
    StepFailure { t: f64, state: Vec<f64> },
    #[error("orbit left the trust region without crossing the section")]
    NoCrossing,
    #[error("fit failure: {0}")]
    FitFailure(String),
}

impl Error {
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::NotSlidingRegion { .. }
                | Error::OutsideSliding { .. }
                | Error::FocusCase(_)
                | Error::Degenerate(_)
                | Error::Domain(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
