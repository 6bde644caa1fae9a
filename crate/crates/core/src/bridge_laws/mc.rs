use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{LimitQuery, TimePartition};
use crate::{Error, LawResult, Provenance, Result};

/// Monte Carlo runs are split into this many independent ChaCha streams.
pub const MC_SHARDS: usize = 16;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fills `out[k]` with `B(times[k])` for a standard bridge; `times` strictly increasing in `(0, 1)`.
pub(crate) fn sample_bridge<R: Rng>(rng: &mut R, times: &[f64], out: &mut [f64]) {
    let (mut t0, mut b0) = (0.0, 0.0);
    for (t, o) in times.iter().zip(out.iter_mut()) {
        let r = (1.0 - t) / (1.0 - t0);
        let var = (t - t0) * r;
        let g: f64 = rng.sample(StandardNormal);
        *o = b0 * r + var.sqrt() * g;
        t0 = *t;
        b0 = *o;
    }
}

fn run_shards(
    n: usize,
    seed: u64,
    hit: impl Fn(&mut ChaCha8Rng) -> bool + Sync,
) -> Result<LawResult> {
    if n == 0 {
        return Err(Error::invalid("Monte Carlo needs at least one sample"));
    }
    let counts: Vec<usize> = (0..MC_SHARDS)
        .into_par_iter()
        .map(|s| {
            let quota = n / MC_SHARDS + usize::from(s < n % MC_SHARDS);
            let mut rng = stream_rng(seed, s as u64);
            (0..quota).filter(|_| hit(&mut rng)).count()
        })
        .collect();
    let k: usize = counts.iter().sum();
    let p = k as f64 / n as f64;
    Ok(LawResult {
        value: p,
        est_error: (p * (1.0 - p) / n as f64).sqrt(),
        imag_residual: 0.0,
        log_scale: 0.0,
        provenance: Provenance::MonteCarlo,
    })
}

/// Monte Carlo estimate of `P(B(a_j) > b_j ∀j)` with exact sequential sampling; `est_error` is one standard error.
pub fn bridge_tail_mc(p: &TimePartition, b: &[f64], n: usize, seed: u64) -> Result<LawResult> {
    p.check_levels(b)?;
    let times = p.interior().to_vec();
    run_shards(n, seed, |rng| {
        let mut path = vec![0.0; times.len()];
        sample_bridge(rng, &times, &mut path);
        path.iter().zip(b).all(|(x, level)| x > level)
    })
}

/// Monte Carlo estimate of the limit law from joint samples of `(B₁, B₂, Z)`.
pub fn limit_tail_mc(q: &LimitQuery, n: usize, seed: u64) -> Result<LawResult> {
    q.validate()?;
    let (times, _, _) = q.merged_levels(0.0);
    let index: Vec<usize> = q
        .taus
        .iter()
        .map(|t| {
            times
                .iter()
                .position(|s| s == t)
                .expect("merged times contain every tau")
        })
        .collect();
    let flat = q.condition == super::Condition::Flat;
    run_shards(n, seed, |rng| {
        let z: f64 = if flat {
            rng.sample(StandardNormal)
        } else {
            0.0
        };
        let mut b1 = vec![0.0; times.len()];
        let mut b2 = vec![0.0; times.len()];
        sample_bridge(rng, &times, &mut b1);
        sample_bridge(rng, &times, &mut b2);
        (0..q.taus.len()).all(|j| {
            let k = index[j];
            let shift = (1.0 - times[k]) * z / std::f64::consts::SQRT_2;
            (b1[k] + q.xs[j] + shift).min(b2[k] - q.xs[j] - shift) > q.hs[j]
        })
    })
}
