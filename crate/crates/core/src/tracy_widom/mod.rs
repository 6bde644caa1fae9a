//! The Hastings–McLeod Painlevé-II function and the GUE/GOE Tracy–Widom laws.
//!
//! With `u` the Hastings–McLeod solution,
//! `F_GUE(L) = exp(−∫_L^∞ (ℓ−L) u²)` and `F_GOE(L) = F_GUE(L)^{1/2} exp(−½∫_L^∞ u)`.
//! Densities are formed from the log-derivatives, never by differencing.

mod distributions;
mod painleve;

pub use distributions::{
    f_flat, f_goe, f_gue, log_f_goe, log_f_gue, log_p_flat, log_p_goe, log_p_gue,
    log_tail_asymptote, p_flat, p_goe, p_gue, tail_asymptote, TailAsymptote, TailFamily,
};
pub use painleve::{hastings_mcleod, PainleveSolution, DEFAULT_X_MATCH, DEFAULT_X_MIN};

#[cfg(test)]
mod tests;
