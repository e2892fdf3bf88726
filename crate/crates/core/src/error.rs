use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Values are carried as `f64` regardless of the scalar type in use so the
/// error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid tolerance (rtol={rtol}, atol={atol}): both must be finite and positive")]
    InvalidTolerance { rtol: f64, atol: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("impulse schedule violates ordering condition (H): {0}")]
    ScheduleOrdering(String),

    #[error("jump equation unsolvable: residual {residual:e} after {iterations} iterations")]
    JumpEquationUnsolvable { residual: f64, iterations: usize },

    #[error("orbit escaped at t={time} (|u|={radius:e})")]
    Escaped { time: f64, radius: f64 },

    #[error("reference period mismatch: quadrature gives {quadrature}, return time gives {return_time}")]
    PeriodMismatch { quadrature: f64, return_time: f64 },

    #[error("action-angle chart is singular at the origin")]
    ChartOrigin,

    #[error("insufficient samples to resolve the smoothing band: need at least {required}, have {available}")]
    InsufficientSamples { required: usize, available: usize },

    #[error("smallness condition A^-1 < eps0 violated (A={a}, eps0={eps0})")]
    SplitCondition { a: f64, eps0: f64 },

    #[error("chart cache: {0}")]
    Cache(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
