use num_complex::Complex;

use crate::{Error, Real, Result};

pub use crate::special::kernel_quad;

/// Exponent of [`kernel_f`]: `−τ̃ζ³/3 + x̃ζ² + h̃ζ`.
pub fn log_kernel_f<T: Real>(zeta: Complex<T>, x: T, tau: T, h: T) -> Complex<T> {
    let z2 = zeta * zeta;
    -(z2 * zeta) * (tau / T::lit(3.0)) + z2 * x + zeta * h
}

/// `f(ζ) = exp(−τ̃ζ³/3 + x̃ζ² + h̃ζ)`. Fails once the exponential overflows.
pub fn kernel_f<T: Real>(zeta: Complex<T>, x: T, tau: T, h: T) -> Result<Complex<T>> {
    let v = log_kernel_f(zeta, x, tau, h).exp();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            location: format!("kernel_f at ζ = {zeta}"),
        })
    }
}

/// Exponent of [`g_factor`].
pub fn log_g_factor<T: Real>(w: Complex<T>, tau: T, x: T, l: T) -> Complex<T> {
    let r2 = T::SQRT_2();
    let w2 = w * w;
    (-(w2 * w) * (tau / (T::lit(6.0) * r2)) + w2 * (x / (T::lit(2.0) * r2))) * l.powf(T::lit(-0.75))
}

/// `g_L(w) = exp((−τ̃w³/(6√2) + x̃w²/(2√2)) L^{−3/4})`.
pub fn g_factor<T: Real>(w: Complex<T>, tau: T, x: T, l: T) -> Complex<T> {
    log_g_factor(w, tau, x, l).exp()
}

/// `J_L(u, v)` for `m = u.len() ≥ 2` points.
pub fn j_factor<T: Real>(u: &[Complex<T>], v: &[Complex<T>], l: T) -> Result<Complex<T>> {
    let m = u.len();
    if m < 2 || v.len() != m {
        return Err(Error::invalid(
            "j_factor needs m ≥ 2 matching u and v points",
        ));
    }
    let a = T::lit(0.5) * T::FRAC_1_SQRT_2() * l.powf(T::lit(-0.75));
    let one = Complex::new(T::one(), T::zero());
    let mut acc = one;
    for j in 0..m - 1 {
        let num = (one - (u[j] - v[j + 1]) * a) * (one + (v[j] - u[j + 1]) * a);
        let d = one - (u[j] - v[j]) * a;
        acc *= num / ((u[j] - u[j + 1]) * (v[j] - v[j + 1]) * d * d);
    }
    Ok(acc / (one - (u[m - 1] - v[m - 1]) * a))
}

/// The `L → ∞` value `∏_{j<m} 1/((u_j − u_{j+1})(v_j − v_{j+1}))`.
pub fn j_limit<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    let mut acc = Complex::new(T::one(), T::zero());
    for j in 0..u.len().saturating_sub(1) {
        acc /= (u[j] - u[j + 1]) * (v[j] - v[j + 1]);
    }
    acc
}
