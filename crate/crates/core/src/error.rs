use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid envelope: {0}")]
    InvalidEnvelope(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive integrator could not keep the step above the
    /// round-off floor.
    #[error("integration failed at t = {t}: step size underflow")]
    IntegrationFailure { t: f64 },

    #[error("quadrature did not converge (achieved error estimate {estimate:e}, requested {requested:e})")]
    QuadratureNonConvergence { estimate: f64, requested: f64 },

    #[error("divergent {0}: the spectrum has no integrable tail")]
    DivergentMoment(String),
}
