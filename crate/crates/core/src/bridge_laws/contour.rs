use num_complex::Complex;

use super::TimePartition;
use crate::contour_quad::{integrate_chain, Contour, QuadSpec};
use crate::special::kernel_quad;
use crate::{Error, LawResult, Provenance, Result};

/// Largest number of intervals accepted by [`bridge_tail_contour`].
pub const MAX_BRIDGE_INTERVALS: usize = 5;
const RESIDUAL_LIMIT: f64 = 1e-8;

/// Placement of the vertical lines `Re u = abscissa + k·spacing`, `k = 0, …, m−1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineLayout {
    pub abscissa: f64,
    pub spacing: f64,
}

impl Default for LineLayout {
    fn default() -> Self {
        LineLayout {
            abscissa: 0.0,
            spacing: 1.0,
        }
    }
}

/// `P(B(a_j) > b_j for all interior j)` from the contour representation, default layout.
pub fn bridge_tail_contour(p: &TimePartition, b: &[f64]) -> Result<LawResult> {
    bridge_tail_contour_with(p, b, LineLayout::default(), &QuadSpec::default())
}

/// As [`bridge_tail_contour`] with an explicit line layout and quadrature.
pub fn bridge_tail_contour_with(
    p: &TimePartition,
    b: &[f64],
    layout: LineLayout,
    spec: &QuadSpec<f64>,
) -> Result<LawResult> {
    p.check_levels(b)?;
    let m = p.intervals();
    if m > MAX_BRIDGE_INTERVALS {
        return Err(Error::DimensionTooLarge {
            dim: m,
            max: MAX_BRIDGE_INTERVALS,
        });
    }
    if !(layout.spacing > 0.0) || !layout.abscissa.is_finite() {
        return Err(Error::invalid(
            "line spacing must be positive and the abscissa finite",
        ));
    }
    let da = p.increments();
    let full: Vec<f64> = std::iter::once(0.0)
        .chain(b.iter().copied())
        .chain(std::iter::once(0.0))
        .collect();
    let db: Vec<f64> = full.windows(2).map(|w| w[1] - w[0]).collect();
    let sites: Vec<Vec<Contour<f64>>> = (0..m)
        .map(|k| {
            vec![Contour::vertical_line(
                layout.abscissa + layout.spacing * k as f64,
            )]
        })
        .collect();
    let r = integrate_chain(
        &sites,
        spec,
        |j, u| kernel_quad(u[0], da[j], db[j]),
        |_, a, b| Complex::new(1.0, 0.0) / (b[0] - a[0]),
    )?;
    let norm = (2.0 * std::f64::consts::PI).sqrt();
    let v = r.value * norm;
    if v.im.abs() > RESIDUAL_LIMIT {
        return Err(Error::ResidualTooLarge {
            residual: v.im.abs(),
            threshold: RESIDUAL_LIMIT,
        });
    }
    Ok(LawResult {
        value: v.re,
        est_error: r.est_error * norm,
        imag_residual: v.im.abs(),
        log_scale: 0.0,
        provenance: Provenance::Contour,
    })
}
