//! Integration contours and deterministic quadrature of complex integrands.
//!
//! Every integral carries the `1/(2πi)` normalization per variable. Error
//! estimates come from re-evaluating at half resolution on the same legs.

mod contour;
mod integrate;
pub mod rules;

pub use contour::{
    min_separation, scale_contour, Contour, ContourKind, Family, NodeSet, Orientation, QuadSpec,
    Scheme,
};
pub use integrate::{
    circle_integrate, integrate, integrate_chain, integrate_tensor, probe_radius, ComplexResult,
    MAX_LATTICE_WORK, MAX_TENSOR_DIM,
};
