//! Hastings–McLeod solution of `u'' = 2u³ + xu` by backward Taylor-series integration.

use crate::contour_quad::rules::gauss_legendre;
use crate::special::{airy_pair, airy_tail_integral};
use crate::{Error, Result};

const ORDER: usize = 30;
const STEP_TOL: f64 = 1e-16;
const MAX_STEP: f64 = 0.5;
const BLOW_UP: f64 = 1e6;
const PIECE_NODES: usize = 32;

/// Default matching point for the Airy boundary condition.
pub const DEFAULT_X_MATCH: f64 = 12.0;
/// Default left end of the integration range.
pub const DEFAULT_X_MIN: f64 = -10.0;

#[derive(Debug, Clone)]
struct Piece {
    x0: f64,
    h: f64,
    coeffs: Vec<f64>,
}

impl Piece {
    fn eval(&self, x: f64) -> (f64, f64, f64) {
        let t = x - self.x0;
        let (mut u, mut du, mut d2u) = (0.0, 0.0, 0.0);
        for (k, a) in self.coeffs.iter().enumerate().rev() {
            let kf = k as f64;
            u = u * t + a;
            if k >= 1 {
                du = du * t + kf * a;
            }
            if k >= 2 {
                d2u = d2u * t + kf * (kf - 1.0) * a;
            }
        }
        (u, du, d2u)
    }

    fn end(&self) -> f64 {
        self.x0 + self.h
    }
}

/// Dense Hastings–McLeod solution on `[x_min, x_max]`.
#[derive(Debug, Clone)]
pub struct PainleveSolution {
    /// Output mesh, descending from `x_max` to `x_min`.
    pub grid: Vec<f64>,
    pub u_values: Vec<f64>,
    pub u_prime_values: Vec<f64>,
    pub x_match: f64,
    pieces: Vec<Piece>,
    /// `∫_{end of piece k}^{x_match}` of `(u², ℓu², u)`.
    cumulative: Vec<[f64; 3]>,
    /// Same integrals over `[x_match, ∞)` with `u = Ai`.
    tail: [f64; 3],
}

fn taylor_coefficients(x0: f64, u: f64, du: f64) -> Vec<f64> {
    let mut a = vec![0.0; ORDER + 1];
    let mut sq = vec![0.0; ORDER + 1];
    let mut cube = vec![0.0; ORDER + 1];
    a[0] = u;
    a[1] = du;
    for k in 0..=ORDER - 2 {
        sq[k] = (0..=k).map(|i| a[i] * a[k - i]).sum();
        cube[k] = (0..=k).map(|i| sq[i] * a[k - i]).sum();
        let prev = if k >= 1 { a[k - 1] } else { 0.0 };
        a[k + 2] = (2.0 * cube[k] + x0 * a[k] + prev) / ((k + 1) * (k + 2)) as f64;
    }
    a
}

fn step_size(a: &[f64]) -> f64 {
    let scale = a[0].abs().max(a[1].abs()).max(f64::MIN_POSITIVE);
    let mut h = MAX_STEP;
    for k in [ORDER - 1, ORDER] {
        if a[k] != 0.0 {
            h = h.min(0.5 * (STEP_TOL * scale / a[k].abs()).powf(1.0 / k as f64));
        }
    }
    h
}

/// Integrals of `(u², ℓu², u)` over `[a, b]` given `u` on that interval.
fn piece_integrals(a: f64, b: f64, u: impl Fn(f64) -> f64) -> [f64; 3] {
    let (x, w) = gauss_legendre::<f64>(PIECE_NODES);
    let half = 0.5 * (b - a);
    let mut out = [0.0; 3];
    for (xi, wi) in x.iter().zip(&w) {
        let l = a + half * (xi + 1.0);
        let v = u(l);
        out[0] += half * wi * v * v;
        out[1] += half * wi * l * v * v;
        out[2] += half * wi * v;
    }
    out
}

/// Integrals of `(Ai², ℓAi², Ai)` over `[x, ∞)`.
pub(crate) fn airy_tail(x: f64) -> Result<[f64; 3]> {
    let (ai, aip) = airy_pair(x)?;
    let i0 = aip * aip - x * ai * ai;
    let i1 = -(x * x * ai * ai - x * aip * aip + ai * aip) / 3.0;
    Ok([i0, i1, airy_tail_integral(x)?])
}

/// Solves backward from `x_match = x_max` with `u = Ai`, `u' = Ai'` there.
pub fn hastings_mcleod(x_min: f64, x_max: f64, mesh: usize) -> Result<PainleveSolution> {
    if !(8.0..=18.0).contains(&x_max) {
        return Err(Error::invalid(format!(
            "x_max must lie in [8, 18], got {x_max}"
        )));
    }
    if !(x_min >= -10.0 && x_min < x_max) {
        return Err(Error::invalid(format!(
            "x_min must lie in [-10, x_max), got {x_min}"
        )));
    }
    if mesh < 2 {
        return Err(Error::invalid("mesh needs at least two nodes"));
    }
    let (mut u, mut du) = airy_pair(x_max)?;
    let mut x = x_max;
    let mut pieces = Vec::new();
    while x > x_min {
        let a = taylor_coefficients(x, u, du);
        let h = -step_size(&a).min(x - x_min);
        let piece = Piece {
            x0: x,
            h,
            coeffs: a,
        };
        let (nu, ndu, _) = piece.eval(x + h);
        if !nu.is_finite() || nu.abs() > BLOW_UP {
            return Err(Error::BlowUp {
                x: x + h,
                u: nu.abs(),
            });
        }
        x = if x + h <= x_min { x_min } else { x + h };
        u = nu;
        du = ndu;
        pieces.push(piece);
    }
    let mut cumulative = Vec::with_capacity(pieces.len());
    let mut acc = [0.0; 3];
    for p in &pieces {
        let part = piece_integrals(p.end(), p.x0, |l| p.eval(l).0);
        for k in 0..3 {
            acc[k] += part[k];
        }
        cumulative.push(acc);
    }
    let mut sol = PainleveSolution {
        grid: Vec::with_capacity(mesh),
        u_values: Vec::with_capacity(mesh),
        u_prime_values: Vec::with_capacity(mesh),
        x_match: x_max,
        pieces,
        cumulative,
        tail: airy_tail(x_max)?,
    };
    for i in 0..mesh {
        let xi = x_max - (x_max - x_min) * i as f64 / (mesh - 1) as f64;
        let (v, dv, _) = sol.piece_for(xi).eval(xi);
        sol.grid.push(xi);
        sol.u_values.push(v);
        sol.u_prime_values.push(dv);
    }
    Ok(sol)
}

impl PainleveSolution {
    /// `hastings_mcleod(-10, 12, 2201)`.
    pub fn standard() -> Result<Self> {
        hastings_mcleod(DEFAULT_X_MIN, DEFAULT_X_MATCH, 2201)
    }

    pub fn x_min(&self) -> f64 {
        *self.grid.last().expect("non-empty grid")
    }

    pub fn x_max(&self) -> f64 {
        self.x_match
    }

    fn piece_index(&self, x: f64) -> usize {
        let k = self.pieces.partition_point(|p| p.end() > x);
        k.min(self.pieces.len() - 1)
    }

    fn piece_for(&self, x: f64) -> &Piece {
        &self.pieces[self.piece_index(x)]
    }

    fn check(&self, x: f64) -> Result<()> {
        if x < self.x_min() || !x.is_finite() || x > crate::special::AIRY_WINDOW.1 {
            return Err(Error::InsufficientRange {
                l: x,
                lo: self.x_min(),
                hi: crate::special::AIRY_WINDOW.1,
            });
        }
        Ok(())
    }

    /// `(u(x), u'(x))`; beyond `x_match` the Airy boundary data is used.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        self.check(x)?;
        if x >= self.x_match {
            return airy_pair(x);
        }
        let (u, du, _) = self.piece_for(x).eval(x);
        Ok((u, du))
    }

    /// `u'' − 2u³ − xu` from the dense output.
    pub fn residual(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        if x >= self.x_match {
            return Ok(0.0);
        }
        let (u, _, d2u) = self.piece_for(x).eval(x);
        Ok(d2u - 2.0 * u * u * u - x * u)
    }

    /// `(∫_L^∞ u², ∫_L^∞ ℓu², ∫_L^∞ u)`.
    pub fn tail_integrals(&self, l: f64) -> Result<[f64; 3]> {
        self.check(l)?;
        if l >= self.x_match {
            return airy_tail(l);
        }
        let k = self.piece_index(l);
        let p = &self.pieces[k];
        let inside = piece_integrals(l, p.x0, |t| p.eval(t).0);
        let before = if k == 0 {
            [0.0; 3]
        } else {
            self.cumulative[k - 1]
        };
        let mut out = [0.0; 3];
        for i in 0..3 {
            out[i] = self.tail[i] + before[i] + inside[i];
        }
        Ok(out)
    }

    /// Number of Taylor pieces used.
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }
}
