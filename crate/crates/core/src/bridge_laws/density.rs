use super::TimePartition;
use crate::special::{gaussian_density, normal_sf};
use crate::{Error, Result};

/// Joint density `√(2π) ∏ φ_{a_j − a_{j−1}}(b_j − b_{j−1})` of `(B(a_1), …, B(a_{m−1}))`
/// at the interior levels `b`.
pub fn bridge_joint_density(p: &TimePartition, b: &[f64]) -> Result<f64> {
    p.check_levels(b)?;
    let full: Vec<f64> = std::iter::once(0.0)
        .chain(b.iter().copied())
        .chain(std::iter::once(0.0))
        .collect();
    let mut d = (2.0 * std::f64::consts::PI).sqrt();
    for (da, db) in p.increments().iter().zip(full.windows(2)) {
        d *= gaussian_density(*da, db[1] - db[0]);
    }
    Ok(d)
}

/// `P(B(τ) > b) = 1 − Φ(b/√(τ(1−τ)))`.
pub fn bridge_tail_closed(tau: f64, b: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::invalid(format!("tau must lie in (0, 1), got {tau}")));
    }
    Ok(normal_sf(b / (tau * (1.0 - tau)).sqrt()))
}
