use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integrand is not finite at {location}")]
    NonFinite { location: String },
    #[error("quadrature did not settle: full {full:e}, half {half:e}")]
    Divergent { full: f64, half: f64 },
    #[error("dimension {dim} exceeds the limit {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("projected node count {nodes:e} exceeds the limit {limit:e}")]
    CostGuard { nodes: f64, limit: f64 },
    #[error("argument {x} outside the supported window [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("Painlevé integration left the Hastings–McLeod branch near x = {x} (|u| = {u:e})")]
    BlowUp { x: f64, u: f64 },
    #[error("L = {l} is not covered by the solution range [{lo}, {hi}]")]
    InsufficientRange { l: f64, lo: f64, hi: f64 },
    #[error("imaginary residual {residual:e} exceeds {threshold:e}")]
    ResidualTooLarge { residual: f64, threshold: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
