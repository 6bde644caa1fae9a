use num_complex::Complex64 as C;

use super::dense::Mat;
use super::kernels::{g_factor, kernel_quad, log_kernel_f};
use super::{Grid, ScaledGrid};
use crate::contour_quad::{probe_radius, Contour, QuadSpec};
use crate::{Error, LawResult, Provenance, Result};

/// Largest `m` accepted by the `n = 1⃗` ratios.
pub const MAX_RATIO_POINTS: usize = 3;
const RESIDUAL_LIMIT: f64 = 1e-6;
const WORK_LIMIT: f64 = 1e11;

/// Σ-family placement: `Σ_{j,left}` has apex `j·scale`, `Σ_{j,right}` apex `−j·scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaLayout {
    pub scale: f64,
}

impl Default for SigmaLayout {
    fn default() -> Self {
        SigmaLayout { scale: 1.0 }
    }
}

impl SigmaLayout {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0) || !self.scale.is_finite() {
            return Err(Error::invalid(format!(
                "Σ layout scale must be positive, got {}",
                self.scale
            )));
        }
        Ok(())
    }

    pub fn left(&self, j: f64) -> Contour<f64> {
        Contour::sigma_left(j * self.scale)
    }

    pub fn right(&self, j: f64) -> Contour<f64> {
        Contour::sigma_right(j * self.scale)
    }
}

/// How the per-variable exponentials are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentForm {
    /// `𝖿(u)·g_L(u)` directly in the scaled variable.
    #[default]
    Scaled,
    /// `log f(ξ)` in the raw variable minus the analytic `L^{3/2}`, `L^{3/4}` terms.
    LogSubtraction,
}

/// Per-site integrand factors in the scaled variables.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SiteKernel {
    pub tau: f64,
    pub x: f64,
    pub h: f64,
    x_raw: f64,
    h_raw: f64,
    l: f64,
    s: f64,
    form: ExponentForm,
}

impl SiteKernel {
    pub fn for_grid(sg: &ScaledGrid, form: ExponentForm) -> Vec<SiteKernel> {
        let (xr, hr) = sg.raw_increments();
        (0..sg.m())
            .map(|j| SiteKernel {
                tau: sg.dtau[j],
                x: sg.dx[j],
                h: sg.dh[j],
                x_raw: xr[j],
                h_raw: hr[j],
                l: sg.l,
                s: sg.s(),
                form,
            })
            .collect()
    }

    fn l34(&self) -> f64 {
        self.l.powf(0.75)
    }

    /// `f(ξ)` divided by its analytic prefactor, `ξ = −√L + s·u`.
    pub fn u_weight(&self, u: C) -> C {
        match self.form {
            ExponentForm::Scaled => {
                kernel_quad(u, self.tau, self.h - self.x) * g_factor(u, self.tau, self.x, self.l)
            }
            ExponentForm::LogSubtraction => {
                let xi = C::new(-self.l.sqrt(), 0.0) + u * self.s;
                let pre = -(2.0 / 3.0) * self.tau * self.l.powf(1.5)
                    + (self.x / std::f64::consts::SQRT_2 - std::f64::consts::SQRT_2 * self.h)
                        * self.l34();
                (log_kernel_f(xi, self.x_raw, self.tau, self.h_raw) - pre).exp()
            }
        }
    }

    /// `1/f(η)` divided by its analytic prefactor, `η = √L + s·v`.
    pub fn v_weight(&self, v: C) -> C {
        match self.form {
            ExponentForm::Scaled => {
                kernel_quad(v, self.tau, -self.h - self.x) / g_factor(v, self.tau, self.x, self.l)
            }
            ExponentForm::LogSubtraction => {
                let eta = C::new(self.l.sqrt(), 0.0) + v * self.s;
                let pre = (2.0 / 3.0) * self.tau * self.l.powf(1.5)
                    + (self.x / std::f64::consts::SQRT_2 + std::f64::consts::SQRT_2 * self.h)
                        * self.l34();
                (pre - log_kernel_f(eta, self.x_raw, self.tau, self.h_raw)).exp()
            }
        }
    }
}

/// Quadrature nodes of one contour with the site function already evaluated.
#[derive(Debug, Clone)]
pub(crate) struct Lattice {
    pub points: Vec<C>,
    /// Quadrature weight times the site function.
    pub mass: Vec<C>,
}

impl Lattice {
    pub fn build(
        contour: &Contour<f64>,
        spec: &QuadSpec<f64>,
        radius: f64,
        f: impl Fn(C) -> C,
    ) -> Result<Self> {
        let nodes = contour.nodes(spec, radius);
        let mut mass = Vec::with_capacity(nodes.len());
        for (p, w) in nodes.points.iter().zip(&nodes.weights) {
            let v = f(*p);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite {
                    location: format!("site weight at u = {p}"),
                });
            }
            mass.push(v * w);
        }
        Ok(Lattice {
            points: nodes.points,
            mass,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

pub(crate) fn radius_for(
    contour: &Contour<f64>,
    spec: &QuadSpec<f64>,
    f: impl Fn(C) -> C,
) -> Result<f64> {
    match spec.truncation_radius {
        Some(r) => Ok(r),
        None => probe_radius(contour, f),
    }
}

/// Both contours of one site: `(Σ_{j,left}, Σ_{j,right})` with their leg lengths.
struct SiteContours {
    left: Contour<f64>,
    right: Contour<f64>,
    r_left: f64,
    r_right: f64,
}

fn d_factor(a: f64, u: C, v: C, last: bool) -> C {
    let d = C::new(1.0, 0.0) - (u - v) * a;
    if last {
        d.inv()
    } else {
        (d * d).inv()
    }
}

/// Contracts the pair chain `Σ S_1 ⋯ S_m` with the `J_L` link
/// `(1 − a(u − v'))(1 + a(v − u'))/((u − u')(v − v'))`, which splits into four separable terms.
fn contract(
    kernels: &[SiteKernel],
    sites: &[SiteContours],
    spec: &QuadSpec<f64>,
    a: f64,
    flat: bool,
    l: f64,
) -> Result<C> {
    let m = kernels.len();
    let lattices: Vec<(Lattice, Lattice)> = sites
        .iter()
        .zip(kernels)
        .enumerate()
        .map(|(j, (sc, k))| {
            let v = Lattice::build(&sc.right, spec, sc.r_right, |v| k.v_weight(v))?;
            let u = if flat && j == 0 {
                // u₁ = −v₁: the left variable rides on the mirrored right nodes
                Lattice {
                    points: v.points.iter().map(|p| -p).collect(),
                    mass: v.points.iter().map(|p| k.u_weight(-p)).collect(),
                }
            } else {
                Lattice::build(&sc.left, spec, sc.r_left, |u| k.u_weight(u))?
            };
            Ok((u, v))
        })
        .collect::<Result<_>>()?;
    let (u0, v0) = &lattices[0];
    let last0 = m == 1;
    let mut state = if flat {
        let c = std::f64::consts::FRAC_1_SQRT_2 * l.powf(-0.75);
        Mat::from_fn(v0.len(), v0.len(), |i, k| {
            if i != k {
                return C::new(0.0, 0.0);
            }
            let v = v0.points[k];
            (C::new(1.0, 0.0) + v * c) * v0.mass[k] * u0.mass[k] * d_factor(a, -v, v, last0)
        })
    } else {
        Mat::from_fn(u0.len(), v0.len(), |i, k| {
            u0.mass[i] * v0.mass[k] * d_factor(a, u0.points[i], v0.points[k], last0)
        })
    };
    for j in 1..m {
        let (pu, pv) = &lattices[j - 1];
        let (cu, cv) = &lattices[j];
        let one = C::new(1.0, 0.0);
        let am = Mat::from_fn(cu.len(), pu.len(), |b, i| {
            (one - pu.points[i] * a) / (pu.points[i] - cu.points[b])
        });
        let bm = Mat::from_fn(cu.len(), pu.len(), |b, i| {
            one / (pu.points[i] - cu.points[b])
        });
        let cm = Mat::from_fn(pv.len(), cv.len(), |k, c| {
            (one + pv.points[k] * a) / (pv.points[k] - cv.points[c])
        });
        let dm = Mat::from_fn(pv.len(), cv.len(), |k, c| {
            one / (pv.points[k] - cv.points[c])
        });
        let as_ = am.mul(&state);
        let bs = bm.mul(&state);
        let p = as_.mul(&cm);
        let q = as_.mul(&dm);
        let r = bs.mul(&cm);
        let t = bs.mul(&dm);
        let last = j == m - 1;
        state = Mat::from_fn(cu.len(), cv.len(), |b, c| {
            let (u, v) = (cu.points[b], cv.points[c]);
            let y =
                p.at(b, c) - u * a * q.at(b, c) + v * a * r.at(b, c) - u * v * (a * a) * t.at(b, c);
            y * cu.mass[b] * cv.mass[c] * d_factor(a, u, v, last)
        });
    }
    let total = state.sum();
    if !(total.re.is_finite() && total.im.is_finite()) {
        return Err(Error::NonFinite {
            location: "pair chain contraction".into(),
        });
    }
    Ok(total)
}

fn evaluate(
    grid: &Grid,
    l: f64,
    spec: &QuadSpec<f64>,
    layout: SigmaLayout,
    form: ExponentForm,
    flat: bool,
) -> Result<LawResult> {
    spec.validate()?;
    layout.validate()?;
    let m = grid.m();
    if m > MAX_RATIO_POINTS {
        return Err(Error::DimensionTooLarge {
            dim: m,
            max: MAX_RATIO_POINTS,
        });
    }
    let sg = ScaledGrid::new(grid, l)?;
    let kernels = SiteKernel::for_grid(&sg, form);
    let n = 2.0 * spec.nodes_per_leg as f64;
    let work = 6.0 * n.powi(3) * (m - 1) as f64;
    if work > WORK_LIMIT {
        return Err(Error::CostGuard {
            nodes: work,
            limit: WORK_LIMIT,
        });
    }
    let sites: Vec<SiteContours> = kernels
        .iter()
        .enumerate()
        .map(|(j, k)| {
            let left = layout.left((j + 1) as f64);
            let right = layout.right((j + 1) as f64);
            let r_left = radius_for(&left, spec, |u| k.u_weight(u))?;
            let r_right = radius_for(&right, spec, |v| k.v_weight(v))?;
            // the flat first site shares one variable, so both factors ride on one leg length
            let r_right = if flat && j == 0 {
                r_right.max(r_left)
            } else {
                r_right
            };
            Ok(SiteContours {
                left,
                right,
                r_left,
                r_right,
            })
        })
        .collect::<Result<_>>()?;
    let a = sg.j_coefficient();
    let full = contract(&kernels, &sites, spec, a, flat, l)?;
    let half = contract(&kernels, &sites, &spec.half(), a, flat, l)?;
    let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
    let norm = sign
        * if flat {
            (4.0 * std::f64::consts::PI).sqrt()
        } else {
            2.0 * std::f64::consts::PI
        };
    let v = full * norm;
    if v.im.abs() > RESIDUAL_LIMIT {
        return Err(Error::ResidualTooLarge {
            residual: v.im.abs(),
            threshold: RESIDUAL_LIMIT,
        });
    }
    Ok(LawResult {
        value: v.re,
        est_error: ((full - half) * norm).norm(),
        imag_residual: v.im.abs(),
        log_scale: 0.0,
        provenance: Provenance::Contour,
    })
}

/// Leading step-data term divided by `(8πL)^{-1} e^{-(4/3)L^{3/2}}`.
pub fn qhat1_ratio_step(grid: &Grid, l: f64, spec: &QuadSpec<f64>) -> Result<LawResult> {
    qhat1_ratio_step_with(grid, l, spec, SigmaLayout::default(), ExponentForm::Scaled)
}

/// As [`qhat1_ratio_step`] with an explicit Σ layout and exponent grouping.
pub fn qhat1_ratio_step_with(
    grid: &Grid,
    l: f64,
    spec: &QuadSpec<f64>,
    layout: SigmaLayout,
    form: ExponentForm,
) -> Result<LawResult> {
    evaluate(grid, l, spec, layout, form, false)
}

/// Leading flat-data term divided by `(8π√L)^{-1/2} e^{-(4/3)L^{3/2}}`, with `u₁ = −v₁`
/// and the exact factor `1 + 2^{-1/2}L^{-3/4}v₁` kept.
pub fn qhat1_ratio_flat(grid: &Grid, l: f64, spec: &QuadSpec<f64>) -> Result<LawResult> {
    qhat1_ratio_flat_with(grid, l, spec, SigmaLayout::default(), ExponentForm::Scaled)
}

/// As [`qhat1_ratio_flat`] with an explicit Σ layout and exponent grouping.
pub fn qhat1_ratio_flat_with(
    grid: &Grid,
    l: f64,
    spec: &QuadSpec<f64>,
    layout: SigmaLayout,
    form: ExponentForm,
) -> Result<LawResult> {
    evaluate(grid, l, spec, layout, form, true)
}
