use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Initial condition of the growth process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Step,
    Flat,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Condition::Step => "step",
            Condition::Flat => "flat",
        })
    }
}

impl std::str::FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "step" => Ok(Condition::Step),
            "flat" => Ok(Condition::Flat),
            other => Err(Error::invalid(format!(
                "unknown condition '{other}', expected step or flat"
            ))),
        }
    }
}

/// Times `0 = a_0 < a_1 < … < a_m = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimePartition {
    a: Vec<f64>,
}

impl TimePartition {
    /// Builds the partition from its interior points `a_1 < … < a_{m−1}`.
    pub fn from_interior(interior: &[f64]) -> Result<Self> {
        let mut a = Vec::with_capacity(interior.len() + 2);
        a.push(0.0);
        a.extend_from_slice(interior);
        a.push(1.0);
        Self::new(a)
    }

    /// Builds the partition from the full list including both endpoints.
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.len() < 2 || a[0] != 0.0 || a[a.len() - 1] != 1.0 {
            return Err(Error::invalid(
                "time partition must start at 0 and end at 1",
            ));
        }
        if a.iter().any(|t| !t.is_finite()) || a.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::invalid(format!(
                "time partition must be strictly increasing: {a:?}"
            )));
        }
        Ok(TimePartition { a })
    }

    /// Number of intervals `m`.
    pub fn intervals(&self) -> usize {
        self.a.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.a
    }

    pub fn interior(&self) -> &[f64] {
        &self.a[1..self.a.len() - 1]
    }

    /// `a_j − a_{j−1}` for `j = 1..=m`.
    pub fn increments(&self) -> Vec<f64> {
        self.a.windows(2).map(|p| p[1] - p[0]).collect()
    }

    pub(crate) fn check_levels(&self, b: &[f64]) -> Result<()> {
        if b.len() != self.intervals() - 1 {
            return Err(Error::invalid(format!(
                "expected {} interior levels, got {}",
                self.intervals() - 1,
                b.len()
            )));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("levels must be finite"));
        }
        Ok(())
    }
}

/// Query for the conditional limit law at points `(𝗑_j, τ_j)` and levels `𝗁_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitQuery {
    pub taus: Vec<f64>,
    pub xs: Vec<f64>,
    pub hs: Vec<f64>,
    pub condition: Condition,
}

impl LimitQuery {
    pub fn new(taus: Vec<f64>, xs: Vec<f64>, hs: Vec<f64>, condition: Condition) -> Result<Self> {
        let q = LimitQuery {
            taus,
            xs,
            hs,
            condition,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.taus.is_empty()
            || self.taus.len() != self.xs.len()
            || self.taus.len() != self.hs.len()
        {
            return Err(Error::invalid(
                "taus, xs and hs must be non-empty and of equal length",
            ));
        }
        if self.taus.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(Error::invalid(format!(
                "every tau must lie strictly inside (0, 1): {:?}",
                self.taus
            )));
        }
        if self.xs.iter().chain(&self.hs).any(|v| !v.is_finite()) {
            return Err(Error::invalid("xs and hs must be finite"));
        }
        Ok(())
    }

    /// Distinct sorted times and, for each, the largest level on each side.
    ///
    /// Side 1 carries `𝗁 − 𝗑 − shift`, side 2 carries `𝗁 + 𝗑 + shift`, where
    /// `shift = (1 − τ) z/√2`.
    pub(crate) fn merged_levels(&self, z: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut idx: Vec<usize> = (0..self.taus.len()).collect();
        idx.sort_by(|&i, &j| self.taus[i].total_cmp(&self.taus[j]));
        let mut times: Vec<f64> = Vec::new();
        let mut side1: Vec<f64> = Vec::new();
        let mut side2: Vec<f64> = Vec::new();
        for i in idx {
            let t = self.taus[i];
            let shift = (1.0 - t) * z / std::f64::consts::SQRT_2;
            let l1 = self.hs[i] - self.xs[i] - shift;
            let l2 = self.hs[i] + self.xs[i] + shift;
            if times.last() == Some(&t) {
                let k = times.len() - 1;
                side1[k] = side1[k].max(l1);
                side2[k] = side2[k].max(l2);
            } else {
                times.push(t);
                side1.push(l1);
                side2.push(l2);
            }
        }
        (times, side1, side2)
    }
}
