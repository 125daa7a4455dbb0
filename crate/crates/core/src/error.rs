use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("radius must be positive (got {0})")]
    NonPositiveRadius(f64),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("could not bracket a root: {0}")]
    Bracketing(&'static str),
    #[error("root solver did not converge: {0}")]
    NoConvergence(&'static str),
    #[error("energy {energy} does not exceed the minimum energy {minimum}")]
    BelowMinimumEnergy { energy: f64, minimum: f64 },
    #[error("period {period} does not exceed the minimal period {minimum}")]
    BelowMinimumPeriod { period: f64, minimum: f64 },
    #[error("quadrature did not converge (last spread {spread:e})")]
    Quadrature { spread: f64 },
    #[error("waveform has non-zero mean {0:e}")]
    NonZeroMean(f64),
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("trajectory reached r <= 0 near t = {t}")]
    RadiusCollapse { t: f64 },
    #[error("maximum number of integration steps exceeded at t = {t}")]
    TooManySteps { t: f64 },
    #[error("no return to the section within the horizon {horizon}")]
    NoReturn { horizon: f64 },
    #[error("period map not monotone: T({h_lo}) = {t_lo} >= T({h_hi}) = {t_hi}")]
    NotMonotone {
        h_lo: f64,
        t_lo: f64,
        h_hi: f64,
        t_hi: f64,
    },
    #[error("Newton shooting failed after {iterations} iterations (residual {residual:e})")]
    NewtonFailed { iterations: usize, residual: f64 },
    #[error("k = 0: unperturbed periodic orbits form a continuous family and are not isolated")]
    DegenerateFamily,
    #[error("reconstructed speed {0} is not below light speed")]
    Superluminal(f64),
    #[error("argument out of range: {0}")]
    OutOfRange(&'static str),
    #[error("field model not supported here: {0}")]
    UnsupportedField(&'static str),
}
