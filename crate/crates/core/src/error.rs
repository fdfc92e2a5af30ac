use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("step size underflow at t = {t:.6} us (h = {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("integrator exceeded {steps} steps at t = {t:.6} us")]
    TooManySteps { t: f64, steps: usize },
    #[error("non-finite state at t = {0:.6} us")]
    NonFinite(f64),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_integrator_failure(&self) -> bool {
        matches!(self, Error::StepSizeUnderflow { .. } | Error::TooManySteps { .. } | Error::NonFinite(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
