//! Airy functions, Gaussian densities and the normal distribution function.

use num_complex::Complex;

use crate::contour_quad::rules::gauss_legendre;
use crate::{Error, Real, Result};

/// Supported window of [`airy`] and [`airy_prime`].
pub const AIRY_WINDOW: (f64, f64) = (-15.0, 30.0);

const AI0: f64 = 0.355_028_053_887_817_239_26;
const AIP0: f64 = 0.258_819_403_792_806_798_41;
const SERIES_LIMIT: f64 = 3.0;

/// `Ai(x)`.
pub fn airy(x: f64) -> Result<f64> {
    airy_pair(x).map(|p| p.0)
}

/// `Ai'(x)`.
pub fn airy_prime(x: f64) -> Result<f64> {
    airy_pair(x).map(|p| p.1)
}

/// `(Ai(x), Ai'(x))` on [`AIRY_WINDOW`].
///
/// Maclaurin series on `|x| ≤ 3`. Beyond that the contour integral
/// `Ai(x) = ∫ exp(t³/3 − xt) dt/(2πi)` is evaluated on a steepest-descent
/// friendly path: the vertical line through the saddle `√x` for `x > 3`, and
/// the imaginary segment between the saddles `±i√(−x)` plus two rays at `±π/3`
/// for `x < −3`.
pub fn airy_pair(x: f64) -> Result<(f64, f64)> {
    let (lo, hi) = AIRY_WINDOW;
    if !(lo..=hi).contains(&x) {
        return Err(Error::OutOfRange { x, lo, hi });
    }
    Ok(if x.abs() <= SERIES_LIMIT {
        airy_series(x)
    } else if x > 0.0 {
        airy_right(x)
    } else {
        airy_left(x)
    })
}

fn airy_series(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let (mut f, mut g) = (0.0, 0.0);
    let (mut fd, mut gd) = (0.0, 0.0);
    let mut tf = 1.0;
    let mut tg = x;
    let mut tfd = x * x / 2.0;
    let mut tgd = 1.0;
    for k in 0..60 {
        let kf = k as f64;
        f += tf;
        g += tg;
        fd += tfd;
        gd += tgd;
        tf *= x3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        tg *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        tfd *= x3 / ((3.0 * kf + 3.0) * (3.0 * kf + 5.0));
        tgd *= x3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        if tf.abs() + tg.abs() + tfd.abs() + tgd.abs()
            < 1e-18 * (f.abs() + g.abs() + fd.abs() + gd.abs())
        {
            break;
        }
    }
    (AI0 * f - AIP0 * g, AI0 * fd - AIP0 * gd)
}

fn panel_rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre::<f64>(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let left = a + h * p as f64;
        for (xi, wi) in x.iter().zip(&w) {
            out.push((left + 0.5 * h * (xi + 1.0), 0.5 * h * wi));
        }
    }
    out
}

fn airy_right(x: f64) -> (f64, f64) {
    let s = x.sqrt();
    let zeta = 2.0 / 3.0 * x * s;
    let ymax = (42.0 / s).sqrt();
    let (mut c, mut sn) = (0.0, 0.0);
    for (y, w) in panel_rule(0.0, ymax, 8, 16) {
        let damp = (-s * y * y).exp();
        let phase = y * y * y / 3.0;
        c += w * damp * phase.cos();
        sn += w * damp * y * phase.sin();
    }
    let pre = (-zeta).exp() / std::f64::consts::PI;
    (pre * c, -pre * (s * c + sn))
}

fn airy_left(x: f64) -> (f64, f64) {
    let a = (-x).sqrt();
    let a2 = a * a;
    let pi = std::f64::consts::PI;
    let (mut ai, mut aip) = (0.0, 0.0);
    for (y, w) in panel_rule(0.0, a, 8, 16) {
        let phase = a2 * y - y * y * y / 3.0;
        ai += w * phase.cos();
        aip += w * y * phase.sin();
    }
    ai /= pi;
    aip /= pi;
    let mut r_max = 1.0;
    while 0.866 * a * r_max * r_max + r_max * r_max * r_max / 3.0 < 42.0 {
        r_max *= 1.25;
    }
    let dir = Complex::from_polar(1.0, pi / 3.0);
    let start = Complex::new(0.0, a);
    let (mut u, mut up) = (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
    for (r, w) in panel_rule(0.0, r_max, 4, 16) {
        let t = start + dir * r;
        let e = (t * t * t / 3.0 + t * a2).exp() * dir * w;
        u += e;
        up -= t * e;
    }
    let norm = Complex::new(0.0, -1.0 / (2.0 * pi));
    (ai + 2.0 * (u * norm).re, aip + 2.0 * (up * norm).re)
}

/// `∫_x^∞ Ai(t) dt` for `x ∈ [3, 30]`, from `∫ exp(t³/3 − xt)/t dt/(2πi)` on `Re t = √x`.
pub fn airy_tail_integral(x: f64) -> Result<f64> {
    let hi = AIRY_WINDOW.1;
    if !(3.0..=hi).contains(&x) {
        return Err(Error::OutOfRange { x, lo: 3.0, hi });
    }
    let s = x.sqrt();
    let ymax = (42.0 / s).sqrt();
    let mut acc = 0.0;
    for (y, w) in panel_rule(0.0, ymax, 8, 16) {
        let phase = y * y * y / 3.0;
        acc += w * (-s * y * y).exp() * (s * phase.cos() - y * phase.sin()) / (x + y * y);
    }
    Ok((-(2.0 / 3.0) * x * s).exp() / std::f64::consts::PI * acc)
}

/// Gaussian density with variance `a`: `(2πa)^{-1/2} exp(-b²/(2a))`.
pub fn gaussian_density<T: Real>(a: T, b: T) -> T {
    (-(b * b) / (T::lit(2.0) * a)).exp() / (T::lit(2.0) * T::PI() * a).sqrt()
}

/// `exp(a u²/2 + b u)`, whose integral over an upward vertical line is the
/// Gaussian density with variance `a` evaluated at `b`.
pub fn kernel_quad<T: Real>(u: Complex<T>, a: T, b: T) -> Complex<T> {
    (u * u * (a / T::lit(2.0)) + u * b).exp()
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal survival function `1 − Φ(x)`, accurate in the upper tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}
