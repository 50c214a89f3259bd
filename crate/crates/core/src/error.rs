use thiserror::Error;

/// Errors raised anywhere in the analytic or simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A model parameter is out of its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Adaptive quadrature hit its subdivision cap before meeting tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}, requested {requested:e}")]
    Quadrature {
        estimate: f64,
        error: f64,
        requested: f64,
    },

    /// Received power requested at the receiver location itself.
    #[error("transmitter located at the receiver (zero distance)")]
    ZeroDistance,

    /// Conditioning on an event whose probability is numerically zero.
    #[error("conditioning event has probability {probability:e}")]
    DegenerateConditioning { probability: f64 },

    /// Arguments outside the branch of a piecewise function.
    #[error("argument outside branch domain: {0}")]
    BranchDomain(String),

    /// Parameter regime where the cell-length model does not apply.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// Tier-2 cells cover the whole line on average, so the tier-1 load formula breaks down.
    #[error("model regime violated: tier-2 coverage fraction {fraction} >= 1")]
    ModelRegime { fraction: f64 },

    /// PMF truncation did not reach the requested tail mass.
    #[error("load PMF truncation exceeded {cap} terms (tail {tail:e})")]
    Truncation { cap: usize, tail: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param_error(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn ensure_nonneg(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(param_error(name, format!("must be finite and >= 0, got {v}")))
    }
}
