//! Contour-integral numerics for conditional multi-time laws of the KPZ fixed point.
//!
//! The crate is organised in four layers:
//!
//! * [`contour_quad`]: integration contours and deterministic complex quadrature.
//! * [`tracy_widom`]: Airy functions, the Hastings–McLeod solution and the
//!   GUE/GOE Tracy–Widom laws.
//! * [`bridge_laws`]: Brownian-bridge densities, tails, limit laws and samplers.
//! * [`kpz_core`]: the finite-L conditional tail formulas in normalized form.
//!
//! Low-level routines are generic over [`Real`]; the aliases below fix `f64`.

pub mod bridge_laws;
pub mod contour_quad;
mod error;
pub mod kpz_core;
mod law;
mod scalar;
pub mod special;
pub mod tracy_widom;

pub use error::{Error, Result};
pub use law::{LawResult, Provenance};
pub use scalar::Real;

/// Double-precision complex number.
pub type Complex64 = num_complex::Complex<f64>;
/// Double-precision contour.
pub type Contour64 = contour_quad::Contour<f64>;
/// Double-precision quadrature controls.
pub type QuadSpec64 = contour_quad::QuadSpec<f64>;
/// Double-precision quadrature result.
pub type ComplexResult64 = contour_quad::ComplexResult<f64>;
