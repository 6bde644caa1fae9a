use serde::Serialize;

use super::{Grid, MultiIndex};
use crate::{Error, Result};

/// Default `ε` in the remainder exponent `−(4(1−2ε)/3)Σ τ̃_j n_j L^{3/2}`.
pub const DEFAULT_EPSILON: f64 = 0.05;
const DEFAULT_CUTOFF: usize = 24;

/// Log-magnitudes of the remainder bound; diagnostic, since the constant is caller-supplied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemainderBound {
    /// Bound for the requested `𝐧`.
    pub log_term: f64,
    /// Bound summed over all `𝐧 ∈ ℕ^m∖{1⃗}` with `max n_j ≤ cutoff`.
    pub log_partial_sum: f64,
    /// Geometric estimate of the shells beyond the cutoff; `-inf` when they vanish, `+inf` if not contracting.
    pub log_tail: f64,
    /// Ratio of the last two shell sums.
    pub shell_ratio: f64,
    pub cutoff: usize,
}

impl RemainderBound {
    /// `log(partial sum + tail)`.
    pub fn log_total(&self) -> f64 {
        log_add(self.log_partial_sum, self.log_tail)
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

fn xlogx_half(k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        0.5 * k as f64 * (k as f64).ln()
    }
}

/// `log` of `n₁^{n₁/2} ∏(n_j+n_{j+1})^{(n_j+n_{j+1})/2} n_m^{n_m/2}`.
pub(crate) fn log_combinatorial(n: &[usize]) -> f64 {
    let m = n.len();
    let mut acc = xlogx_half(n[0]) + xlogx_half(n[m - 1]);
    for j in 0..m - 1 {
        acc += xlogx_half(n[j] + n[j + 1]);
    }
    acc
}

fn log_term(n: &MultiIndex, dtau: &[f64], l32: f64, log_c: f64, eps: f64) -> f64 {
    let decay: f64 = n.n.iter().zip(dtau).map(|(&k, t)| k as f64 * t).sum();
    log_combinatorial(&n.n) + n.total() as f64 * log_c
        - 2.0 * n.log_factorial()
        - 4.0 * (1.0 - 2.0 * eps) / 3.0 * decay * l32
}

/// Remainder bound for `𝐧` on `grid` at scale `L` with caller constant `C` and slack `ε ∈ (0, 1/2)`.
pub fn remainder_bound_expression(
    grid: &Grid,
    n: &MultiIndex,
    l: f64,
    c_user: f64,
    eps: f64,
) -> Result<RemainderBound> {
    remainder_bound_with_cutoff(grid, n, l, c_user, eps, DEFAULT_CUTOFF)
}

/// As [`remainder_bound_expression`] with an explicit shell cutoff.
pub fn remainder_bound_with_cutoff(
    grid: &Grid,
    n: &MultiIndex,
    l: f64,
    c_user: f64,
    eps: f64,
    cutoff: usize,
) -> Result<RemainderBound> {
    let m = grid.m();
    if n.n.len() != m {
        return Err(Error::invalid(format!(
            "multi-index {n} does not match m = {m}"
        )));
    }
    if !(c_user > 0.0) || !c_user.is_finite() {
        return Err(Error::invalid(format!(
            "the constant C must be positive, got {c_user}"
        )));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::invalid(format!("ε must lie in (0, 1/2), got {eps}")));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::invalid(format!("L must be positive, got {l}")));
    }
    if cutoff < 2 {
        return Err(Error::invalid("the shell cutoff must be at least 2"));
    }
    let (dtau, _, _) = grid.increments();
    let l32 = l.powf(1.5);
    let log_c = c_user.ln();
    let mut shells = vec![f64::NEG_INFINITY; cutoff + 1];
    let mut idx = vec![1usize; m];
    loop {
        let k = *idx.iter().max().unwrap();
        if idx.iter().any(|&v| v != 1) {
            let t = log_term(&MultiIndex::new(idx.clone()), &dtau, l32, log_c, eps);
            shells[k] = log_add(shells[k], t);
        }
        let mut i = m;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] <= cutoff {
                break;
            }
            idx[i] = 1;
            if i == 0 {
                i = usize::MAX;
                break;
            }
        }
        if i == usize::MAX {
            break;
        }
    }
    let partial = shells.iter().fold(f64::NEG_INFINITY, |a, &b| log_add(a, b));
    let ratio = (shells[cutoff] - shells[cutoff - 1]).exp();
    let log_tail = if shells[cutoff] == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if ratio < 1.0 {
        shells[cutoff] + ratio.ln() - (-ratio).ln_1p()
    } else {
        f64::INFINITY
    };
    Ok(RemainderBound {
        log_term: log_term(n, &dtau, l32, log_c, eps),
        log_partial_sum: partial,
        log_tail,
        shell_ratio: ratio,
        cutoff,
    })
}
