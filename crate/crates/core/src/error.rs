use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("theta mismatch: {left} vs {right}")]
    ThetaMismatch { left: f64, right: f64 },

    #[error("direction index {0} is not 1 or 2")]
    BadDirection(usize),

    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),

    #[error("element is not self-adjoint (defect {defect:.3e})")]
    NotSelfAdjoint { defect: f64 },

    #[error("positivity certificate failed: lambda_min = {lambda_min:.6e} (threshold {threshold:.1e})")]
    NotPositive { lambda_min: f64, threshold: f64 },

    #[error("{method} did not converge after {iterations} iterations (last residual {residual:.3e})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("scaling guard failed: no contraction certified for the initial guess")]
    ScalingGuard,

    #[error("oracle: {0}")]
    Oracle(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("inner derivation rejected: {0}")]
    NotInnerDerivation(String),

    #[error("derivation outside the span of the mu table (residual {residual:.3e})")]
    OutsideSpan { residual: f64 },

    #[error("curvature paths disagree: {difference:.3e} > {limit:.3e}")]
    PathDisagreement { difference: f64, limit: f64 },

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
