use num_complex::Complex64 as C;
use rayon::prelude::*;

use super::dense::Mat;
use super::ratio::{radius_for, ExponentForm, Lattice, SigmaLayout, SiteKernel};
use super::{Grid, MultiIndex, ScaledGrid};
use crate::contour_quad::{circle_integrate, QuadSpec};
use crate::{Error, LawResult, Provenance, Result};

/// Default radius of the `z` circle.
pub const DEFAULT_Z_RADIUS: f64 = 2.0;
/// Work units (complex multiply-adds, roughly) a single evaluation may project before refusing.
pub const SMALLN_WORK_LIMIT: f64 = 1e9;
const MAX_SMALLN_TOTAL: usize = 3;

/// Quadrature controls sized for the small-n lattice sums.
pub fn smalln_default_spec() -> QuadSpec<f64> {
    QuadSpec::default().with_nodes(24)
}

fn z_spec() -> QuadSpec<f64> {
    QuadSpec::default().with_nodes(64)
}

/// `Q̂^{(𝐧)}` for step data at `m = 2`, in the normalization of the `n = 1⃗` ratio.
///
/// The series weight `1/(𝐧!)²` is not applied; see [`MultiIndex::series_weight`].
pub fn qhatn_step_smalln(
    grid: &Grid,
    n: &MultiIndex,
    l: f64,
    spec: &QuadSpec<f64>,
    z_radius: f64,
) -> Result<LawResult> {
    qhatn_step_smalln_with(grid, n, l, spec, z_radius, SigmaLayout::default())
}

/// As [`qhatn_step_smalln`] with an explicit Σ layout. The `in` contours sit at apex 0,
/// `C_1` at `±scale`, `out` at `±2·scale`.
pub fn qhatn_step_smalln_with(
    grid: &Grid,
    n: &MultiIndex,
    l: f64,
    spec: &QuadSpec<f64>,
    z_radius: f64,
    layout: SigmaLayout,
) -> Result<LawResult> {
    spec.validate()?;
    layout.validate()?;
    if grid.m() != 2 || n.n.len() != 2 {
        return Err(Error::invalid("the small-n evaluator needs m = 2"));
    }
    if n.total() > MAX_SMALLN_TOTAL {
        return Err(Error::invalid(format!(
            "n₁ + n₂ must be at most {MAX_SMALLN_TOTAL}, got {n}"
        )));
    }
    if !(z_radius > 1.0) || !z_radius.is_finite() {
        return Err(Error::invalid(format!(
            "z radius must exceed 1, got {z_radius}"
        )));
    }
    let sg = ScaledGrid::new(grid, l)?;
    let (n1, n2) = (n.n[0], n.n[1]);
    let ls = log_scale(&sg, n);
    if n2 == 0 {
        // the trailing Σ(ξ − η) over an empty index set vanishes identically
        return Ok(LawResult {
            value: 0.0,
            est_error: 0.0,
            imag_residual: 0.0,
            log_scale: ls,
            provenance: Provenance::Contour,
        });
    }
    let nodes = 2.0 * spec.nodes_per_leg as f64;
    let work = projected_work(n1, n2, nodes);
    if work > SMALLN_WORK_LIMIT {
        return Err(Error::CostGuard {
            nodes: work,
            limit: SMALLN_WORK_LIMIT,
        });
    }
    let kernels = SiteKernel::for_grid(&sg, ExponentForm::Scaled);
    let setup = Setup::new(&kernels, spec, layout)?;
    let zs = z_weights(n1, n2, z_radius)?;
    let full = setup.total(&sg, n1, n2, spec, &zs)?;
    let half = setup.total(&sg, n1, n2, &spec.half(), &zs)?;
    let norm = 8.0 * std::f64::consts::PI * l * sg.s().powi(2 * n.total() as i32) * ls.exp();
    let v = full * norm;
    Ok(LawResult {
        value: v.re,
        est_error: ((full - half) * norm).norm(),
        imag_residual: v.im.abs(),
        log_scale: ls,
        provenance: Provenance::Contour,
    })
}

/// `Σ_j n_j(−(4/3)τ̃_j L^{3/2} − 2√2 𝗁̃_j L^{3/4}) + (4/3)L^{3/2}`.
fn log_scale(sg: &ScaledGrid, n: &MultiIndex) -> f64 {
    let l32 = sg.l.powf(1.5);
    let l34 = sg.l.powf(0.75);
    let mut acc = (4.0 / 3.0) * l32;
    for (j, &k) in n.n.iter().enumerate() {
        acc += k as f64
            * (-(4.0 / 3.0) * sg.dtau[j] * l32 - 2.0 * std::f64::consts::SQRT_2 * sg.dh[j] * l34);
    }
    acc
}

fn projected_work(n1: usize, n2: usize, nodes: f64) -> f64 {
    let p = 2.0 * nodes;
    let tables = match n1 {
        0 => 0.0,
        1 => (p + 1.0) * nodes * nodes + (p + 1.0) * nodes * (p + 1.0),
        _ => (p + 1.0) * nodes * nodes + (p + 1.0) * nodes * (p + 1.0) + p * 5.0 * nodes.powi(3),
    };
    let classes = ((n2 + 1) * (n2 + 1)) as f64;
    let configs = classes * nodes.powi(2 * n2 as i32) * ((n2 * n2) as f64 + 4.0);
    tables + configs
}

/// `(out_ξ, out_η, multiplicity · ∮ weight(z) dz/(2πi z(1 − z)))` per branch class.
///
/// The class integrand is `±z^{a}(1 − z)^{b}`, so the circle integral is its Laurent
/// coefficient at infinity; the trapezoidal circle value is kept as a cross-check.
fn z_weights(n1: usize, n2: usize, radius: f64) -> Result<Vec<(usize, usize, C)>> {
    let mut out = Vec::new();
    for kx in 0..=n2 {
        for ky in 0..=n2 {
            let outs = (kx + ky) as i32;
            let ins = (2 * n2) as i32 - outs;
            let exact = z_residue(n1 as i32, n2 as i32, outs);
            let f = |z: C| {
                let one = C::new(1.0, 0.0);
                let w = (one / (one - z)).powi(ins) * (-z / (one - z)).powi(outs);
                w * (one - z).powi(n1 as i32) * (one - one / z).powi(n2 as i32) / (z * (one - z))
            };
            let circle = circle_integrate(radius, &z_spec(), f)?;
            if (circle.value - exact).norm() > 1e-9 * exact.abs().max(1.0) {
                return Err(Error::Divergent {
                    full: circle.value.norm(),
                    half: exact.abs(),
                });
            }
            let mult = (binomial(n2, kx) * binomial(n2, ky)) as f64;
            out.push((kx, ky, C::new(exact * mult, 0.0)));
        }
    }
    Ok(out)
}

/// Coefficient of `z^{-1}` at infinity of `(−1)^{outs+n₂} z^{outs−n₂−1}(1 − z)^{n₁−n₂−1}`.
fn z_residue(n1: i32, n2: i32, outs: i32) -> f64 {
    let b = n1 - n2 - 1;
    let k = outs + n1 - 2 * n2 - 1;
    if k < 0 {
        return 0.0;
    }
    let mut binom = 1.0;
    for i in 0..k {
        binom *= (b - i) as f64 / (i + 1) as f64;
    }
    let sign = if (outs + n2 + b + k).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    sign * binom
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

struct Setup<'a> {
    kernels: &'a [SiteKernel],
    layout: SigmaLayout,
    radii: [f64; 6],
}

/// Node sets for one resolution. Site-2 points are indexed `in` first, then `out`.
struct Nodes {
    x1: Lattice,
    y1: Lattice,
    xi: Lattice,
    eta: Lattice,
    xi_in: usize,
    eta_in: usize,
}

impl<'a> Setup<'a> {
    fn new(kernels: &'a [SiteKernel], spec: &QuadSpec<f64>, layout: SigmaLayout) -> Result<Self> {
        let (k1, k2) = (kernels[0], kernels[1]);
        let u = |k: SiteKernel| move |z: C| k.u_weight(z);
        let v = |k: SiteKernel| move |z: C| k.v_weight(z);
        let radii = [
            radius_for(&layout.left(1.0), spec, u(k1))?,
            radius_for(&layout.right(1.0), spec, v(k1))?,
            radius_for(&layout.left(0.0), spec, u(k2))?,
            radius_for(&layout.left(2.0), spec, u(k2))?,
            radius_for(&layout.right(0.0), spec, v(k2))?,
            radius_for(&layout.right(2.0), spec, v(k2))?,
        ];
        Ok(Setup {
            kernels,
            layout,
            radii,
        })
    }

    fn nodes(&self, spec: &QuadSpec<f64>) -> Result<Nodes> {
        let (k1, k2) = (self.kernels[0], self.kernels[1]);
        let lay = &self.layout;
        let r = &self.radii;
        let x1 = Lattice::build(&lay.left(1.0), spec, r[0], |z| k1.u_weight(z))?;
        let y1 = Lattice::build(&lay.right(1.0), spec, r[1], |z| k1.v_weight(z))?;
        let xin = Lattice::build(&lay.left(0.0), spec, r[2], |z| k2.u_weight(z))?;
        let xout = Lattice::build(&lay.left(2.0), spec, r[3], |z| k2.u_weight(z))?;
        let yin = Lattice::build(&lay.right(0.0), spec, r[4], |z| k2.v_weight(z))?;
        let yout = Lattice::build(&lay.right(2.0), spec, r[5], |z| k2.v_weight(z))?;
        let cat = |a: Lattice, b: Lattice| Lattice {
            points: a.points.into_iter().chain(b.points).collect(),
            mass: a.mass.into_iter().chain(b.mass).collect(),
        };
        let (xi_in, eta_in) = (xin.len(), yin.len());
        Ok(Nodes {
            x1,
            y1,
            xi: cat(xin, xout),
            eta: cat(yin, yout),
            xi_in,
            eta_in,
        })
    }

    /// `(−1)^{m−1} Σ_classes Z_class · I_class` in the scaled variables, before `8πL s^{2|n|} e^{log_scale}`.
    fn total(
        &self,
        sg: &ScaledGrid,
        n1: usize,
        n2: usize,
        spec: &QuadSpec<f64>,
        zs: &[(usize, usize, C)],
    ) -> Result<C> {
        let nodes = self.nodes(spec)?;
        let geo = Geometry {
            s: sg.s(),
            gap: -2.0 * sg.l.sqrt(),
        };
        let tables = Tables::build(&nodes, &geo, n1, n2);
        let mut acc = C::new(0.0, 0.0);
        for &(kx, ky, zw) in zs {
            if zw == C::new(0.0, 0.0) {
                continue;
            }
            let xr = ranges(n2, kx, nodes.xi_in, nodes.xi.len());
            let yr = ranges(n2, ky, nodes.eta_in, nodes.eta.len());
            let i = class_sum(&nodes, &geo, &tables, n1, &xr, &yr);
            acc += zw * i;
        }
        let parity = if (n1 + n2) % 2 == 0 { 1.0 } else { -1.0 };
        Ok(-acc * parity)
    }
}

/// Slot ranges: the first `n2 − k` slots on `in`, the remaining `k` on `out`.
fn ranges(n2: usize, k: usize, n_in: usize, n_all: usize) -> Vec<(usize, usize)> {
    (0..n2)
        .map(|i| if i < n2 - k { (0, n_in) } else { (n_in, n_all) })
        .collect()
}

#[derive(Clone, Copy)]
struct Geometry {
    s: f64,
    gap: f64,
}

impl Geometry {
    /// `ξ − ξ'` for two left points.
    #[inline]
    fn ll(&self, a: C, b: C) -> C {
        (a - b) * self.s
    }

    /// `ξ − η`.
    #[inline]
    fn lr(&self, u: C, v: C) -> C {
        C::new(self.gap, 0.0) + (u - v) * self.s
    }
}

/// Partial-fraction tables for the site-1 reduction. Row/column 0 stands for the constant term.
struct Tables {
    t1: Option<Mat>,
    t2: Option<Quartic>,
}

/// Tables for `Σ_{y,y'} c(y)c(y')M(y,y')²` with one site-2 pair.
struct Quartic {
    inf: PairTable,
    mixed: Vec<PairTable>,
    same: Vec<PairTable>,
}

/// `V_∞ᵀHV_∞`, `V_∞ᵀHV_q`, `V_qᵀHV_q` for one Hadamard product `H`.
struct PairTable {
    a: C,
    b: Vec<C>,
    c: Vec<C>,
}

impl Tables {
    fn build(nd: &Nodes, g: &Geometry, n1: usize, n2: usize) -> Tables {
        if n1 == 0 {
            return Tables { t1: None, t2: None };
        }
        let (nx, ny) = (nd.x1.len(), nd.y1.len());
        let (p, q) = (nd.xi.len(), nd.eta.len());
        let u = Mat::from_fn(p + 1, nx, |r, x| {
            let a = nd.x1.mass[x];
            if r == 0 {
                a
            } else {
                a / g.ll(nd.x1.points[x], nd.xi.points[r - 1])
            }
        });
        let v = Mat::from_fn(ny, q + 1, |y, c| {
            let a = nd.y1.mass[y];
            if c == 0 {
                a
            } else {
                a / ((nd.y1.points[y] - nd.eta.points[c - 1]) * g.s)
            }
        });
        let k = Mat::from_fn(nx, ny, |x, y| g.lr(nd.x1.points[x], nd.y1.points[y]).inv());
        let k2 = Mat::from_fn(nx, ny, |x, y| k.at(x, y) * k.at(x, y));
        let t1 = u.mul(&k2).mul(&v);
        let t2 = (n1 == 2 && n2 == 1).then(|| {
            let kt = Mat::from_fn(ny, nx, |y, x| k.at(x, y));
            let moment = |row: usize| {
                let dk = Mat::from_fn(nx, ny, |x, y| u.at(row, x) * k.at(x, y));
                kt.mul(&dk)
            };
            let pair = |a: &Mat, b: &Mat| -> PairTable {
                let h = Mat::from_fn(ny, ny, |i, j| a.at(i, j) * b.at(i, j));
                let hv = h.mul(&v);
                let mut t = PairTable {
                    a: C::new(0.0, 0.0),
                    b: vec![C::new(0.0, 0.0); q],
                    c: vec![C::new(0.0, 0.0); q],
                };
                for y in 0..ny {
                    let v0 = v.at(y, 0);
                    t.a += v0 * hv.at(y, 0);
                    for c in 0..q {
                        t.b[c] += v0 * hv.at(y, c + 1);
                        t.c[c] += v.at(y, c + 1) * hv.at(y, c + 1);
                    }
                }
                t
            };
            let m0 = moment(0);
            let inf = pair(&m0, &m0);
            let (mixed, same): (Vec<_>, Vec<_>) = (1..=p)
                .map(|r| {
                    let mp = moment(r);
                    (pair(&m0, &mp), pair(&mp, &mp))
                })
                .unzip();
            Quartic { inf, mixed, same }
        });
        Tables { t1: Some(t1), t2 }
    }
}

/// `Σ` over one branch class of the site-2 configurations, site 1 already eliminated.
fn class_sum(
    nd: &Nodes,
    g: &Geometry,
    tb: &Tables,
    n1: usize,
    xr: &[(usize, usize)],
    yr: &[(usize, usize)],
) -> C {
    let n2 = xr.len();
    let (lo, hi) = xr[0];
    let partial: Vec<C> = (lo..hi)
        .into_par_iter()
        .map(|first| {
            let mut xi = vec![first; n2];
            let mut eta: Vec<usize> = yr.iter().map(|r| r.0).collect();
            let mut acc = C::new(0.0, 0.0);
            for (i, r) in xr.iter().enumerate().skip(1) {
                xi[i] = r.0;
            }
            loop {
                loop {
                    acc += config(nd, g, tb, n1, &xi, &eta);
                    if !advance(&mut eta, yr, 0) {
                        break;
                    }
                }
                for (i, r) in yr.iter().enumerate() {
                    eta[i] = r.0;
                }
                if !advance(&mut xi, xr, 1) {
                    break;
                }
            }
            acc
        })
        .collect();
    partial.into_iter().sum()
}

/// Odometer over `idx[from..]` within `ranges`; false once exhausted.
fn advance(idx: &mut [usize], ranges: &[(usize, usize)], from: usize) -> bool {
    for i in (from..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < ranges[i].1 {
            return true;
        }
        idx[i] = ranges[i].0;
    }
    false
}

fn config(nd: &Nodes, g: &Geometry, tb: &Tables, n1: usize, xi: &[usize], eta: &[usize]) -> C {
    let n2 = xi.len();
    for i in 0..n2 {
        for k in i + 1..n2 {
            if xi[i] == xi[k] || eta[i] == eta[k] {
                return C::new(0.0, 0.0);
            }
        }
    }
    let xp = |i: usize| nd.xi.points[xi[i]];
    let yp = |i: usize| nd.eta.points[eta[i]];
    let mut mass = C::new(1.0, 0.0);
    let mut dxx = C::new(1.0, 0.0);
    let mut dyy = C::new(1.0, 0.0);
    let mut dxy = C::new(1.0, 0.0);
    let mut trace = C::new(0.0, 0.0);
    for i in 0..n2 {
        mass *= nd.xi.mass[xi[i]] * nd.eta.mass[eta[i]];
        trace += g.lr(xp(i), yp(i));
        for k in 0..n2 {
            dxy *= g.lr(xp(i), yp(k));
            if k > i {
                dxx *= g.ll(xp(k), xp(i));
                dyy *= (yp(k) - yp(i)) * g.s;
            }
        }
    }
    let cauchy = dxx * dyy / dxy;
    let site1 = match (n1, &tb.t1) {
        (0, _) | (_, None) => C::new(1.0, 0.0),
        (_, Some(t)) => {
            // α(x) = 1 + Σ R_b/(x − ξ_b), β(y) = 1 + Σ S_b/(y − η_b)
            let mut r = [C::new(0.0, 0.0); MAX_SMALLN_TOTAL];
            let mut s = [C::new(0.0, 0.0); MAX_SMALLN_TOTAL];
            for b in 0..n2 {
                let mut rn = C::new(1.0, 0.0);
                let mut sn = C::new(1.0, 0.0);
                for c in 0..n2 {
                    rn *= g.lr(xp(b), yp(c));
                    sn *= -g.lr(xp(c), yp(b));
                    if c != b {
                        rn /= g.ll(xp(b), xp(c));
                        sn /= (yp(b) - yp(c)) * g.s;
                    }
                }
                r[b] = rn;
                s[b] = sn;
            }
            let mut tr = t.at(0, 0);
            for b in 0..n2 {
                tr += r[b] * t.at(1 + xi[b], 0) + s[b] * t.at(0, 1 + eta[b]);
                for c in 0..n2 {
                    tr += r[b] * s[c] * t.at(1 + xi[b], 1 + eta[c]);
                }
            }
            match &tb.t2 {
                Some(qt) if n1 == 2 => {
                    let (p, q) = (xi[0], eta[0]);
                    let (rr, ss) = (r[0], s[0]);
                    let part = |pt: &PairTable| pt.a + ss * pt.b[q] * 2.0 + ss * ss * pt.c[q];
                    let qd =
                        part(&qt.inf) + rr * part(&qt.mixed[p]) * 2.0 + rr * rr * part(&qt.same[p]);
                    (tr * tr - qd) * 2.0
                }
                _ => tr,
            }
        }
    };
    mass * cauchy * cauchy * trace * site1
}
