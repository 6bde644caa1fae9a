use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::contour::{Contour, NodeSet, QuadSpec};
use crate::{Error, Real, Result};

/// Largest dimension accepted by [`integrate_tensor`].
pub const MAX_TENSOR_DIM: usize = 8;
/// Largest number of integrand evaluations a single lattice sum may schedule.
pub const MAX_LATTICE_WORK: f64 = 1e10;

const CHUNK: usize = 4096;
const PROBE_STEP: f64 = 0.25;
const PROBE_FLOOR: f64 = 1e-16;
const PROBE_MAX_RADIUS: f64 = 400.0;
const L1_FLOOR: f64 = 1e-4;

/// A quadrature value with its half-resolution discrepancy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexResult<T> {
    pub value: Complex<T>,
    pub est_error: T,
}

#[derive(Clone, Copy)]
struct Sum<T> {
    value: Complex<T>,
    l1: T,
}

impl<T: Real> Sum<T> {
    fn zero() -> Self {
        Sum {
            value: Complex::new(T::zero(), T::zero()),
            l1: T::zero(),
        }
    }

    fn add(&mut self, term: Complex<T>) {
        self.value += term;
        self.l1 += term.norm();
    }

    fn merge(mut self, other: Self) -> Self {
        self.value += other.value;
        self.l1 += other.l1;
        self
    }
}

fn finite<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn non_finite<T: Real>(z: Complex<T>) -> Error {
    Error::NonFinite {
        location: format!("u = {} {:+}i", z.re, z.im),
    }
}

fn check_sum<T: Real>(s: &Sum<T>) -> Result<()> {
    if finite(s.value) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            location: "accumulated sum".into(),
        })
    }
}

fn finish<T: Real>(spec: &QuadSpec<T>, full: Sum<T>, half: Sum<T>) -> Result<ComplexResult<T>> {
    check_sum(&full)?;
    check_sum(&half)?;
    let diff = (full.value - half.value).norm();
    let scale = full.value.norm().max(T::lit(L1_FLOOR) * full.l1);
    if diff > T::lit(1e3) * spec.relative_tolerance * scale {
        return Err(Error::Divergent {
            full: full.value.norm().to_f64().unwrap_or(f64::NAN),
            half: half.value.norm().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(ComplexResult {
        value: full.value,
        est_error: diff,
    })
}

/// Leg length at which `|f|` has dropped below `1e-16` of its running peak on both legs.
pub fn probe_radius<T, F>(contour: &Contour<T>, f: F) -> Result<T>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    let v0 = f(contour.vertex);
    if !finite(v0) {
        return Err(non_finite(contour.vertex));
    }
    let mut peak = v0.norm();
    let step = T::lit(PROBE_STEP);
    let mut below = 0;
    let mut k = 1usize;
    loop {
        let r = step * T::count(k);
        if r > T::lit(PROBE_MAX_RADIUS) {
            return Err(Error::invalid(format!(
                "integrand does not decay along the contour with vertex {}",
                contour.vertex
            )));
        }
        let mut m = T::zero();
        for upper in [true, false] {
            let z = contour.point(r, upper);
            let v = f(z);
            if !finite(v) {
                return Err(non_finite(z));
            }
            m = m.max(v.norm());
        }
        peak = peak.max(m);
        if m <= T::lit(PROBE_FLOOR) * peak {
            below += 1;
            if below == 2 {
                return Ok(r);
            }
        } else {
            below = 0;
        }
        k += 1;
    }
}

fn radius_for<T, F>(spec: &QuadSpec<T>, contour: &Contour<T>, f: F) -> Result<T>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    match spec.truncation_radius {
        Some(r) => Ok(r),
        None => probe_radius(contour, f),
    }
}

fn sum_nodes<T, F>(nodes: &NodeSet<T>, f: &F) -> Result<Sum<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    let mut s = Sum::zero();
    for (z, w) in nodes.points.iter().zip(&nodes.weights) {
        let v = f(*z);
        if !finite(v) {
            return Err(non_finite(*z));
        }
        s.add(v * *w);
    }
    Ok(s)
}

/// `∫ f(u) du/(2πi)` along the oriented contour.
pub fn integrate<T, F>(contour: &Contour<T>, spec: &QuadSpec<T>, f: F) -> Result<ComplexResult<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    spec.validate()?;
    let radius = radius_for(spec, contour, &f)?;
    let full = sum_nodes(&contour.nodes(spec, radius), &f)?;
    let half = sum_nodes(&contour.nodes(&spec.half(), radius), &f)?;
    finish(spec, full, half)
}

/// `∮_{|z| = radius} f(z) dz/(2πi)`, counter-clockwise, by the trapezoidal rule.
pub fn circle_integrate<T, F>(radius: T, spec: &QuadSpec<T>, f: F) -> Result<ComplexResult<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    spec.validate()?;
    if !(radius > T::one()) || !radius.is_finite() {
        return Err(Error::invalid(format!(
            "circle radius must exceed 1, got {radius}"
        )));
    }
    let eval = |m: usize| -> Result<Sum<T>> {
        let mut s = Sum::zero();
        let mf = T::count(m);
        for k in 0..m {
            let theta = T::lit(2.0) * T::PI() * T::count(k) / mf;
            let z = Complex::from_polar(radius, theta);
            let v = f(z);
            if !finite(v) {
                return Err(non_finite(z));
            }
            s.add(v * z / mf);
        }
        Ok(s)
    };
    let m = (4 * spec.nodes_per_leg).max(32);
    let full = eval(m)?;
    let half = eval(m / 2)?;
    finish(spec, full, half)
}

fn vertex_point<T: Real>(contours: &[Contour<T>]) -> Vec<Complex<T>> {
    contours.iter().map(|c| c.vertex).collect()
}

fn tensor_radii<T, F>(contours: &[Contour<T>], spec: &QuadSpec<T>, f: &F) -> Result<Vec<T>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Complex<T>,
{
    let base = vertex_point(contours);
    contours
        .iter()
        .enumerate()
        .map(|(k, c)| {
            radius_for(spec, c, |z| {
                let mut p = base.clone();
                p[k] = z;
                f(&p)
            })
        })
        .collect()
}

fn decode<T: Real>(mut idx: usize, nodes: &[NodeSet<T>], point: &mut [Complex<T>]) -> Complex<T> {
    let mut w = Complex::new(T::one(), T::zero());
    for d in (0..nodes.len()).rev() {
        let n = nodes[d].len();
        let i = idx % n;
        idx /= n;
        point[d] = nodes[d].points[i];
        w *= nodes[d].weights[i];
    }
    w
}

fn tensor_sum<T, F>(nodes: &[NodeSet<T>], f: &F) -> Result<Sum<T>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Complex<T> + Sync,
{
    let total: usize = nodes.iter().map(NodeSet::len).product();
    let chunks = total.div_ceil(CHUNK);
    let partial: Vec<Result<Sum<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut point = vec![Complex::new(T::zero(), T::zero()); nodes.len()];
            let mut s = Sum::zero();
            for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let w = decode(idx, nodes, &mut point);
                let v = f(&point);
                if !finite(v) {
                    return Err(Error::NonFinite {
                        location: format!("lattice point {idx}"),
                    });
                }
                s.add(v * w);
            }
            Ok(s)
        })
        .collect();
    let mut s = Sum::zero();
    for p in partial {
        s = s.merge(p?);
    }
    Ok(s)
}

/// Tensor-product quadrature of `∫ f(u) ∏ du_k/(2πi)` over the product of contours.
pub fn integrate_tensor<T, F>(
    contours: &[Contour<T>],
    spec: &QuadSpec<T>,
    f: F,
) -> Result<ComplexResult<T>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> Complex<T> + Sync,
{
    spec.validate()?;
    let dim = contours.len();
    if dim == 0 || dim > MAX_TENSOR_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: MAX_TENSOR_DIM,
        });
    }
    let work = (2.0 * spec.nodes_per_leg as f64).powi(dim as i32);
    if work > MAX_LATTICE_WORK {
        return Err(Error::CostGuard {
            nodes: work,
            limit: MAX_LATTICE_WORK,
        });
    }
    let radii = tensor_radii(contours, spec, &f)?;
    let build = |s: &QuadSpec<T>| -> Vec<NodeSet<T>> {
        contours
            .iter()
            .zip(&radii)
            .map(|(c, r)| c.nodes(s, *r))
            .collect()
    };
    let full = tensor_sum(&build(spec), &f)?;
    let half = tensor_sum(&build(&spec.half()), &f)?;
    finish(spec, full, half)
}

/// Lattice of one chain site: every combination of its variables' nodes.
struct SiteLattice<T> {
    dim: usize,
    points: Vec<Complex<T>>,
    weights: Vec<Complex<T>>,
}

impl<T: Real> SiteLattice<T> {
    fn new(nodes: &[NodeSet<T>]) -> Self {
        let dim = nodes.len();
        let total: usize = nodes.iter().map(NodeSet::len).product();
        let mut points = vec![Complex::new(T::zero(), T::zero()); total * dim];
        let mut weights = Vec::with_capacity(total);
        for idx in 0..total {
            weights.push(decode(idx, nodes, &mut points[idx * dim..(idx + 1) * dim]));
        }
        SiteLattice {
            dim,
            points,
            weights,
        }
    }

    fn len(&self) -> usize {
        self.weights.len()
    }

    fn point(&self, i: usize) -> &[Complex<T>] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }
}

/// Quadrature of a chain-structured integrand
///
/// `∫ ∏_j weight(j, x_j) ∏_j link(j, x_j, x_{j+1}) ∏ dx/(2πi)`,
///
/// where `x_j` collects the variables of site `j` (one per contour in `sites[j]`).
/// The node lattice is the same as [`integrate_tensor`] would use; the sum is
/// contracted site by site, so the cost is `Σ_j |site_j|·|site_{j+1}|`.
pub fn integrate_chain<T, W, K>(
    sites: &[Vec<Contour<T>>],
    spec: &QuadSpec<T>,
    weight: W,
    link: K,
) -> Result<ComplexResult<T>>
where
    T: Real,
    W: Fn(usize, &[Complex<T>]) -> Complex<T> + Sync,
    K: Fn(usize, &[Complex<T>], &[Complex<T>]) -> Complex<T> + Sync,
{
    spec.validate()?;
    if sites.is_empty() || sites.iter().any(Vec::is_empty) {
        return Err(Error::invalid(
            "every chain site needs at least one contour",
        ));
    }
    let n = 2.0 * spec.nodes_per_leg as f64;
    let sizes: Vec<f64> = sites.iter().map(|s| n.powi(s.len() as i32)).collect();
    let work: f64 = sizes.windows(2).map(|w| w[0] * w[1]).sum::<f64>() + sizes.iter().sum::<f64>();
    if work > MAX_LATTICE_WORK {
        return Err(Error::CostGuard {
            nodes: work,
            limit: MAX_LATTICE_WORK,
        });
    }
    let mut radii = Vec::with_capacity(sites.len());
    for (j, site) in sites.iter().enumerate() {
        radii.push(tensor_radii(site, spec, &|p: &[Complex<T>]| weight(j, p))?);
    }
    let run = |s: &QuadSpec<T>| -> Result<Sum<T>> {
        let lattices: Vec<SiteLattice<T>> = sites
            .iter()
            .zip(&radii)
            .map(|(site, r)| {
                let nodes: Vec<NodeSet<T>> =
                    site.iter().zip(r).map(|(c, r)| c.nodes(s, *r)).collect();
                SiteLattice::new(&nodes)
            })
            .collect();
        chain_sum(&lattices, &weight, &link)
    };
    let full = run(spec)?;
    let half = run(&spec.half())?;
    finish(spec, full, half)
}

fn site_values<T, W>(j: usize, lat: &SiteLattice<T>, weight: &W) -> Result<Vec<Complex<T>>>
where
    T: Real,
    W: Fn(usize, &[Complex<T>]) -> Complex<T> + Sync,
{
    (0..lat.len())
        .into_par_iter()
        .map(|i| {
            let v = weight(j, lat.point(i));
            if finite(v) {
                Ok(v * lat.weights[i])
            } else {
                Err(non_finite(lat.point(i)[0]))
            }
        })
        .collect()
}

fn chain_sum<T, W, K>(lattices: &[SiteLattice<T>], weight: &W, link: &K) -> Result<Sum<T>>
where
    T: Real,
    W: Fn(usize, &[Complex<T>]) -> Complex<T> + Sync,
    K: Fn(usize, &[Complex<T>], &[Complex<T>]) -> Complex<T> + Sync,
{
    // The absolute chain runs alongside so `l1` is the lattice norm of the full integrand.
    let mut state: Vec<(Complex<T>, T)> = site_values(0, &lattices[0], weight)?
        .into_iter()
        .map(|v| (v, v.norm()))
        .collect();
    for j in 1..lattices.len() {
        let prev = &lattices[j - 1];
        let cur = &lattices[j];
        let local = site_values(j, cur, weight)?;
        let next: Result<Vec<(Complex<T>, T)>> = (0..cur.len())
            .into_par_iter()
            .map(|b| {
                let pb = cur.point(b);
                let mut acc = Complex::new(T::zero(), T::zero());
                let mut abs = T::zero();
                for (a, (sa, ra)) in state.iter().enumerate() {
                    let k = link(j - 1, prev.point(a), pb);
                    acc += *sa * k;
                    abs += *ra * k.norm();
                }
                let v = acc * local[b];
                if finite(v) {
                    Ok((v, abs * local[b].norm()))
                } else {
                    Err(non_finite(pb[0]))
                }
            })
            .collect();
        state = next?;
    }
    let mut s = Sum::zero();
    for (v, r) in state {
        s.value += v;
        s.l1 += r;
    }
    Ok(s)
}
