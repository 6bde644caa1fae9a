use super::contour::{bridge_tail_contour_with, LineLayout};
use super::{Condition, LimitQuery, TimePartition};
use crate::contour_quad::rules::gauss_hermite;
use crate::contour_quad::QuadSpec;
use crate::{Error, LawResult, Provenance, Result};

/// Quadrature for the average over the Gaussian tilt `Z` of the flat law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZRule {
    /// Gauss–Hermite with the given number of nodes against the standard normal weight.
    GaussHermite(usize),
    /// Evaluate at a single value of `Z`.
    PointMass(f64),
}

impl Default for ZRule {
    fn default() -> Self {
        ZRule::GaussHermite(64)
    }
}

impl ZRule {
    fn nodes(&self) -> Vec<(f64, f64)> {
        match *self {
            ZRule::PointMass(z) => vec![(z, 1.0)],
            ZRule::GaussHermite(n) => {
                let (x, w) = gauss_hermite(n);
                let sp = std::f64::consts::PI.sqrt();
                x.iter()
                    .zip(&w)
                    .map(|(x, w)| (std::f64::consts::SQRT_2 * x, w / sp))
                    .collect()
            }
        }
    }
}

fn side(times: &[f64], levels: &[f64], spec: &QuadSpec<f64>) -> Result<LawResult> {
    let p = TimePartition::from_interior(times)?;
    bridge_tail_contour_with(&p, levels, LineLayout::default(), spec)
}

fn product_at(q: &LimitQuery, z: f64, spec: &QuadSpec<f64>) -> Result<(f64, f64, f64)> {
    let (times, l1, l2) = q.merged_levels(z);
    let a = side(&times, &l1, spec)?;
    let b = side(&times, &l2, spec)?;
    Ok((
        a.value * b.value,
        a.est_error * b.value.abs() + b.est_error * a.value.abs(),
        a.imag_residual + b.imag_residual,
    ))
}

fn require(q: &LimitQuery, c: Condition) -> Result<()> {
    q.validate()?;
    if q.condition != c {
        return Err(Error::invalid(format!(
            "query condition is {}, expected {c}",
            q.condition
        )));
    }
    Ok(())
}

/// Step limit law `P(B₁(τ_j) > 𝗁_j − 𝗑_j ∀j)·P(B₂(τ_j) > 𝗁_j + 𝗑_j ∀j)`.
pub fn limit_tail_step(q: &LimitQuery) -> Result<LawResult> {
    limit_tail_step_with(q, &QuadSpec::default())
}

/// As [`limit_tail_step`] with explicit quadrature controls.
pub fn limit_tail_step_with(q: &LimitQuery, spec: &QuadSpec<f64>) -> Result<LawResult> {
    require(q, Condition::Step)?;
    let (value, est_error, imag_residual) = product_at(q, 0.0, spec)?;
    Ok(LawResult {
        value,
        est_error,
        imag_residual,
        log_scale: 0.0,
        provenance: Provenance::Contour,
    })
}

/// Flat limit law: the step product with levels tilted by `∓(1−τ_j)Z/√2`, averaged over `Z ~ N(0, 1)`.
pub fn limit_tail_flat(q: &LimitQuery) -> Result<LawResult> {
    limit_tail_flat_with(q, ZRule::default(), &QuadSpec::default())
}

/// As [`limit_tail_flat`] with an explicit `Z` rule and quadrature controls.
pub fn limit_tail_flat_with(
    q: &LimitQuery,
    rule: ZRule,
    spec: &QuadSpec<f64>,
) -> Result<LawResult> {
    require(q, Condition::Flat)?;
    let (mut value, mut est_error, mut imag_residual) = (0.0, 0.0, 0.0);
    for (z, w) in rule.nodes() {
        let (v, e, r) = product_at(q, z, spec)?;
        value += w * v;
        est_error += w * e;
        imag_residual += w * r;
    }
    Ok(LawResult {
        value,
        est_error,
        imag_residual,
        log_scale: 0.0,
        provenance: Provenance::Contour,
    })
}

/// Dispatches on the query's condition with default controls.
pub fn limit_tail(q: &LimitQuery) -> Result<LawResult> {
    match q.condition {
        Condition::Step => limit_tail_step(q),
        Condition::Flat => limit_tail_flat(q),
    }
}
