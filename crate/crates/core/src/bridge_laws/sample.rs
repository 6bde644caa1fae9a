use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::mc::{sample_bridge, stream_rng};
use super::Condition;
use crate::{Error, Result};

/// One joint sample of `(B₁, B₂, Z)` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub seed: u64,
    pub stream: u64,
    pub taus: Vec<f64>,
    pub bridge1: Vec<f64>,
    pub bridge2: Vec<f64>,
    /// Gaussian tilt; `None` for step initial data.
    pub z: Option<f64>,
}

impl FieldSample {
    /// `(1 − τ_j) Z/√2`, zero for step data.
    pub fn shift(&self, j: usize) -> f64 {
        self.z
            .map_or(0.0, |z| (1.0 - self.taus[j]) * z / std::f64::consts::SQRT_2)
    }

    /// `min{B₁(τ_j) + 𝗑 + shift, B₂(τ_j) − 𝗑 − shift}`.
    pub fn value(&self, j: usize, x: f64) -> f64 {
        let s = self.shift(j);
        (self.bridge1[j] + x + s).min(self.bridge2[j] - x - s)
    }

    /// Apex `(v₁, v₂)` of the right angle at `τ_j`.
    pub fn vertex(&self, j: usize) -> (f64, f64) {
        let (b1, b2) = (self.bridge1[j], self.bridge2[j]);
        ((b2 - b1) / 2.0 - self.shift(j), (b1 + b2) / 2.0)
    }
}

fn check_taus(taus: &[f64]) -> Result<()> {
    if taus.is_empty()
        || taus.iter().any(|t| !(*t > 0.0 && *t < 1.0))
        || taus.windows(2).any(|p| p[1] <= p[0])
    {
        return Err(Error::invalid(format!(
            "sampling grid must be strictly increasing inside (0, 1): {taus:?}"
        )));
    }
    Ok(())
}

fn draw(taus: &[f64], condition: Condition, seed: u64, stream: u64) -> FieldSample {
    let mut rng = stream_rng(seed, stream);
    let z = match condition {
        Condition::Flat => Some(rng.sample(StandardNormal)),
        Condition::Step => None,
    };
    let mut bridge1 = vec![0.0; taus.len()];
    let mut bridge2 = vec![0.0; taus.len()];
    sample_bridge(&mut rng, taus, &mut bridge1);
    sample_bridge(&mut rng, taus, &mut bridge2);
    FieldSample {
        seed,
        stream,
        taus: taus.to_vec(),
        bridge1,
        bridge2,
        z,
    }
}

/// Exact joint sample of the limit field on `taus` (stream 0 of `seed`).
pub fn sample_limit_field(taus: &[f64], condition: Condition, seed: u64) -> Result<FieldSample> {
    check_taus(taus)?;
    Ok(draw(taus, condition, seed, 0))
}

/// `count` independent samples; sample `i` uses ChaCha stream `i` of `seed`.
pub fn sample_limit_fields(
    taus: &[f64],
    condition: Condition,
    seed: u64,
    count: usize,
) -> Result<Vec<FieldSample>> {
    check_taus(taus)?;
    Ok((0..count as u64)
        .map(|i| draw(taus, condition, seed, i))
        .collect())
}
