use serde::{Deserialize, Serialize};

use crate::bridge_laws::{Condition, LimitQuery};
use crate::{Error, Result};

/// Space-time points `(𝗑_j, τ_j)` and levels `𝗁_j`, `j = 1..=m`, ending at `(0, 1)` with level 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    taus: Vec<f64>,
    xs: Vec<f64>,
    hs: Vec<f64>,
}

impl Grid {
    /// Full specification including the terminal point `τ_m = 1`, `𝗑_m = 𝗁_m = 0`.
    pub fn new(taus: Vec<f64>, xs: Vec<f64>, hs: Vec<f64>) -> Result<Self> {
        let m = taus.len();
        if m < 2 {
            return Err(Error::invalid("a grid needs m ≥ 2 points"));
        }
        if xs.len() != m || hs.len() != m {
            return Err(Error::invalid(format!(
                "grid lengths differ: {} times, {} positions, {} levels",
                m,
                xs.len(),
                hs.len()
            )));
        }
        if taus.iter().chain(&xs).chain(&hs).any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid entries must be finite"));
        }
        if taus[0] <= 0.0 || taus.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "grid times must be strictly increasing in (0, 1]; repeated times are only served by the limit law: {taus:?}"
            )));
        }
        if taus[m - 1] != 1.0 || xs[m - 1] != 0.0 || hs[m - 1] != 0.0 {
            return Err(Error::invalid(
                "the last grid point must be τ = 1 with position and level 0",
            ));
        }
        Ok(Grid { taus, xs, hs })
    }

    /// Grid from the interior points only; the terminal point is appended.
    pub fn from_interior(taus: &[f64], xs: &[f64], hs: &[f64]) -> Result<Self> {
        let close = |v: &[f64], last: f64| v.iter().copied().chain(std::iter::once(last)).collect();
        Self::new(close(taus, 1.0), close(xs, 0.0), close(hs, 0.0))
    }

    /// The symmetric two-point grid `τ₁ = 1/2`, `𝗑₁ = 𝗁₁ = 0`.
    pub fn symmetric() -> Self {
        Self::from_interior(&[0.5], &[0.0], &[0.0]).unwrap()
    }

    pub fn m(&self) -> usize {
        self.taus.len()
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn hs(&self) -> &[f64] {
        &self.hs
    }

    /// The matching query on the limit law.
    pub fn limit_query(&self, condition: Condition) -> Result<LimitQuery> {
        let k = self.m() - 1;
        LimitQuery::new(
            self.taus[..k].to_vec(),
            self.xs[..k].to_vec(),
            self.hs[..k].to_vec(),
            condition,
        )
    }

    /// `τ̃_j`, `𝗑̃_j`, `𝗁̃_j` for `j = 1..=m`.
    pub fn increments(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        (diffs(&self.taus), diffs(&self.xs), diffs(&self.hs))
    }
}

fn diffs(v: &[f64]) -> Vec<f64> {
    let mut prev = 0.0;
    v.iter()
        .map(|&x| {
            let d = x - prev;
            prev = x;
            d
        })
        .collect()
}

/// A grid at scale `L`: `h_{L,j} = τ_j L + √2 𝗁_j L^{1/4}`, `x_{L,j} = 𝗑_j/(√2 L^{1/4})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledGrid {
    pub l: f64,
    pub h_l: Vec<f64>,
    pub x_l: Vec<f64>,
    /// `τ̃_j`.
    pub dtau: Vec<f64>,
    /// `𝗑̃_j`.
    pub dx: Vec<f64>,
    /// `𝗁̃_j`.
    pub dh: Vec<f64>,
}

impl ScaledGrid {
    pub fn new(grid: &Grid, l: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::invalid(format!(
                "L must be positive and finite, got {l}"
            )));
        }
        let q = l.powf(0.25);
        let r2 = std::f64::consts::SQRT_2;
        let h_l = grid
            .taus
            .iter()
            .zip(&grid.hs)
            .map(|(t, h)| t * l + h * r2 * q)
            .collect();
        let x_l = grid.xs.iter().map(|x| x / (r2 * q)).collect();
        let (dtau, dx, dh) = grid.increments();
        Ok(ScaledGrid {
            l,
            h_l,
            x_l,
            dtau,
            dx,
            dh,
        })
    }

    pub fn m(&self) -> usize {
        self.dtau.len()
    }

    /// `x̃_{L,j}` and `h̃_{L,j}`, the increments of the unscaled arguments.
    pub fn raw_increments(&self) -> (Vec<f64>, Vec<f64>) {
        (diffs(&self.x_l), diffs(&self.h_l))
    }

    /// `2^{-1/2} L^{-1/4}`, the scale linking `ξ = −√L + s·u` and `η = √L + s·v`.
    pub fn s(&self) -> f64 {
        std::f64::consts::FRAC_1_SQRT_2 * self.l.powf(-0.25)
    }

    /// `2^{-3/2} L^{-3/4}`, the coefficient in the correction factor `J_L`.
    pub fn j_coefficient(&self) -> f64 {
        0.5 * std::f64::consts::FRAC_1_SQRT_2 * self.l.powf(-0.75)
    }
}

/// Occupation numbers `(n_1, …, n_m)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub n: Vec<usize>,
}

impl MultiIndex {
    pub fn new(n: Vec<usize>) -> Self {
        MultiIndex { n }
    }

    pub fn ones(m: usize) -> Self {
        MultiIndex { n: vec![1; m] }
    }

    pub fn total(&self) -> usize {
        self.n.iter().sum()
    }

    pub fn is_ones(&self) -> bool {
        self.n.iter().all(|&k| k == 1)
    }

    /// `Σ_j log n_j!`.
    pub fn log_factorial(&self) -> f64 {
        self.n
            .iter()
            .map(|&k| (2..=k).map(|i| (i as f64).ln()).sum::<f64>())
            .sum()
    }

    /// The series weight `1/(𝐧!)²`.
    pub fn series_weight(&self) -> f64 {
        (-2.0 * self.log_factorial()).exp()
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.n.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl std::str::FromStr for MultiIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let n: std::result::Result<Vec<usize>, _> =
            t.split(',').map(|p| p.trim().parse::<usize>()).collect();
        n.map(MultiIndex::new).map_err(|_| {
            Error::invalid(format!(
                "cannot parse multi-index '{s}', expected e.g. (2,1)"
            ))
        })
    }
}
