use serde::{Deserialize, Serialize};

/// How a [`LawResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Contour,
    MonteCarlo,
}

/// A probability or normalized density ratio with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LawResult {
    pub value: f64,
    /// Half-resolution discrepancy for quadrature, one standard error for Monte Carlo.
    pub est_error: f64,
    /// Imaginary part left over by the quadrature; zero for real-valued methods.
    pub imag_residual: f64,
    /// Natural log of the analytic scale factor already applied to `value`.
    pub log_scale: f64,
    pub provenance: Provenance,
}
