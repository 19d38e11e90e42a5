use thiserror::Error;

/// Errors raised by the analytic model, the simulator and the CLI layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("argument outside the domain of {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("derivative order {0} exceeds the supported maximum of 4")]
    UnsupportedOrder(usize),

    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e}")]
    NonConvergence { estimate: f64, error: f64 },

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("no sign change of P_out^BS - target on the xi bracket (outage {lo_outage:e} at the low end, {hi_outage:e} at the high end)")]
    BracketFailure { lo_outage: f64, hi_outage: f64 },

    #[error("at least {required} Monte Carlo realizations are required, got {got}")]
    InsufficientSamples { required: usize, got: usize },

    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
