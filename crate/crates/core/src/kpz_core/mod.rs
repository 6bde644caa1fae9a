//! Finite-L conditional tail formulas in normalized form.
//!
//! Everything is evaluated in the scaled variables `ξ = −√L + 2^{-1/2}L^{-1/4}u`,
//! `η = √L + 2^{-1/2}L^{-1/4}v`, with the `e^{±(2/3)L^{3/2}}` prefactors removed
//! analytically before any exponential is taken.

mod dense;
mod grid;
mod kernels;
mod ratio;
mod remainder;
mod smalln;

pub use grid::{Grid, MultiIndex, ScaledGrid};
pub use kernels::{g_factor, j_factor, j_limit, kernel_f, kernel_quad, log_g_factor, log_kernel_f};
pub use ratio::{
    qhat1_ratio_flat, qhat1_ratio_flat_with, qhat1_ratio_step, qhat1_ratio_step_with, ExponentForm,
    SigmaLayout, MAX_RATIO_POINTS,
};
pub use remainder::{
    remainder_bound_expression, remainder_bound_with_cutoff, RemainderBound, DEFAULT_EPSILON,
};
pub use smalln::{
    qhatn_step_smalln, qhatn_step_smalln_with, smalln_default_spec, DEFAULT_Z_RADIUS,
    SMALLN_WORK_LIMIT,
};
