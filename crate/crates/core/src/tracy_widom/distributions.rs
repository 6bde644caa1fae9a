use serde::{Deserialize, Serialize};

use super::painleve::PainleveSolution;
use crate::{Error, Result};

const TWO_TWO_THIRDS: f64 = 1.587_401_051_968_199_4;

/// `−log F_GUE(L) = ∫_L^∞ (ℓ − L) u²(ℓ) dℓ`.
fn neg_log_f_gue(l: f64, sol: &PainleveSolution) -> Result<f64> {
    let [i0, i1, _] = sol.tail_integrals(l)?;
    Ok((i1 - l * i0).max(0.0))
}

/// GUE Tracy–Widom distribution function.
pub fn f_gue(l: f64, sol: &PainleveSolution) -> Result<f64> {
    Ok((-neg_log_f_gue(l, sol)?).exp())
}

/// `log F_GUE(L)`.
pub fn log_f_gue(l: f64, sol: &PainleveSolution) -> Result<f64> {
    Ok(-neg_log_f_gue(l, sol)?)
}

/// GUE Tracy–Widom density `F_GUE(L) ∫_L^∞ u²`.
pub fn p_gue(l: f64, sol: &PainleveSolution) -> Result<f64> {
    Ok(log_p_gue(l, sol)?.exp())
}

/// `log p_GUE(L)`.
pub fn log_p_gue(l: f64, sol: &PainleveSolution) -> Result<f64> {
    let [i0, _, _] = sol.tail_integrals(l)?;
    Ok(log_f_gue(l, sol)? + i0.ln())
}

/// `log F_GOE(L) = ½ log F_GUE(L) − ½ ∫_L^∞ u`.
pub fn log_f_goe(l: f64, sol: &PainleveSolution) -> Result<f64> {
    let [_, _, iu] = sol.tail_integrals(l)?;
    Ok(0.5 * log_f_gue(l, sol)? - 0.5 * iu)
}

/// GOE Tracy–Widom distribution function.
pub fn f_goe(l: f64, sol: &PainleveSolution) -> Result<f64> {
    Ok(log_f_goe(l, sol)?.exp())
}

/// `log p_GOE(L)`, using `d/dL log F_GOE = ½(∫_L^∞ u² + u(L))`.
pub fn log_p_goe(l: f64, sol: &PainleveSolution) -> Result<f64> {
    let [i0, _, _] = sol.tail_integrals(l)?;
    let (u, _) = sol.eval(l)?;
    Ok(log_f_goe(l, sol)? + (0.5 * (i0 + u)).ln())
}

/// GOE Tracy–Widom density.
pub fn p_goe(l: f64, sol: &PainleveSolution) -> Result<f64> {
    Ok(log_p_goe(l, sol)?.exp())
}

/// One-point distribution function of the flat KPZ fixed point at time 1: `F_GOE(2^{2/3} L)`.
pub fn f_flat(l: f64, sol: &PainleveSolution) -> Result<f64> {
    f_goe(TWO_TWO_THIRDS * l, sol)
}

/// `log p_flat(L)`.
pub fn log_p_flat(l: f64, sol: &PainleveSolution) -> Result<f64> {
    Ok(TWO_TWO_THIRDS.ln() + log_p_goe(TWO_TWO_THIRDS * l, sol)?)
}

/// Flat density `2^{2/3} p_GOE(2^{2/3} L)`.
pub fn p_flat(l: f64, sol: &PainleveSolution) -> Result<f64> {
    Ok(log_p_flat(l, sol)?.exp())
}

/// Densities with a closed-form right-tail asymptote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailFamily {
    GueDensity,
    FlatDensity,
    GoeDensity,
}

/// `prefactor(L)·exp(exponent(L))` for a [`TailFamily`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailAsymptote {
    pub family: TailFamily,
}

impl TailAsymptote {
    pub fn new(family: TailFamily) -> Self {
        TailAsymptote { family }
    }

    pub fn exponent(&self, l: f64) -> f64 {
        let c = match self.family {
            TailFamily::GueDensity | TailFamily::FlatDensity => 4.0 / 3.0,
            TailFamily::GoeDensity => 2.0 / 3.0,
        };
        -c * l * l.sqrt()
    }

    pub fn log_prefactor(&self, l: f64) -> f64 {
        let pi = std::f64::consts::PI;
        match self.family {
            TailFamily::GueDensity => -(8.0 * pi * l).ln(),
            TailFamily::FlatDensity => -0.5 * (8.0 * pi * l.sqrt()).ln(),
            TailFamily::GoeDensity => -(4.0 * pi.sqrt() * l.powf(0.25)).ln(),
        }
    }

    pub fn prefactor(&self, l: f64) -> f64 {
        self.log_prefactor(l).exp()
    }

    /// `log(prefactor·exp(exponent))`; finite for every `L > 0`.
    pub fn log_value(&self, l: f64) -> Result<f64> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::invalid(format!(
                "tail asymptote needs L > 0, got {l}"
            )));
        }
        Ok(self.log_prefactor(l) + self.exponent(l))
    }

    pub fn value(&self, l: f64) -> Result<f64> {
        Ok(self.log_value(l)?.exp())
    }
}

/// Closed-form right-tail asymptote of the given density at `L > 0`.
pub fn tail_asymptote(family: TailFamily, l: f64) -> Result<f64> {
    TailAsymptote::new(family).value(l)
}

/// Natural log of [`tail_asymptote`].
pub fn log_tail_asymptote(family: TailFamily, l: f64) -> Result<f64> {
    TailAsymptote::new(family).log_value(l)
}
