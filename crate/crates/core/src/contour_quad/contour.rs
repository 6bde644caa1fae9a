use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::rules::{clenshaw_curtis, gauss_legendre};
use crate::{Error, Real, Result};

/// Shape of a contour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContourKind {
    /// Two rays `vertex + r e^{±iθ}`, `r > 0`.
    RayPair,
    /// The line `Re u = vertex`.
    VerticalLine,
}

/// Traversal sense. `Upward` enters along the lower leg and leaves along the upper one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Upward,
    Downward,
}

/// Which way the legs run off to infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Left,
    Right,
    Vertical,
}

/// A ray-pair or vertical-line path in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contour<T> {
    pub kind: ContourKind,
    pub vertex: Complex<T>,
    pub angle: T,
    pub orientation: Orientation,
}

/// Quadrature rule family applied along each leg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scheme<T> {
    /// Gauss–Legendre on `panels` panels whose widths grow by `grading` away from the vertex.
    GaussLegendrePanels {
        panels: usize,
        grading: T,
    },
    ClenshawCurtis,
}

/// Deterministic quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec<T> {
    /// Leg length. `None` selects it with a probe pass on the integrand.
    pub truncation_radius: Option<T>,
    pub nodes_per_leg: usize,
    pub scheme: Scheme<T>,
    pub relative_tolerance: T,
}

impl<T: Real> Default for QuadSpec<T> {
    fn default() -> Self {
        QuadSpec {
            truncation_radius: None,
            nodes_per_leg: 96,
            scheme: Scheme::GaussLegendrePanels {
                panels: 6,
                grading: T::lit(1.25),
            },
            relative_tolerance: T::lit(1e-6),
        }
    }
}

impl<T: Real> QuadSpec<T> {
    pub fn with_nodes(mut self, nodes_per_leg: usize) -> Self {
        self.nodes_per_leg = nodes_per_leg;
        self
    }

    pub fn with_radius(mut self, radius: T) -> Self {
        self.truncation_radius = Some(radius);
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme<T>) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_leg < 4 {
            return Err(Error::invalid(format!(
                "nodes_per_leg must be at least 4, got {}",
                self.nodes_per_leg
            )));
        }
        if let Some(r) = self.truncation_radius {
            if !(r > T::zero()) || !r.is_finite() {
                return Err(Error::invalid(format!(
                    "truncation radius must be positive, got {r}"
                )));
            }
        }
        if !(self.relative_tolerance > T::zero()) {
            return Err(Error::invalid("relative tolerance must be positive"));
        }
        match self.scheme {
            Scheme::GaussLegendrePanels { panels, grading } => {
                if panels == 0 || !(grading > T::zero()) {
                    return Err(Error::invalid(
                        "panel layout needs panels >= 1 and grading > 0",
                    ));
                }
            }
            Scheme::ClenshawCurtis => {}
        }
        Ok(())
    }

    /// The companion spec used for the error estimate.
    pub fn half(&self) -> Self {
        let mut h = *self;
        h.nodes_per_leg = (self.nodes_per_leg / 2).max(2);
        h
    }

    /// Abscissae and weights on `[0, radius]`.
    pub fn leg_rule(&self, radius: T) -> (Vec<T>, Vec<T>) {
        match self.scheme {
            Scheme::ClenshawCurtis => {
                let (x, w) = clenshaw_curtis::<T>(self.nodes_per_leg.max(2));
                let half = radius / T::lit(2.0);
                x.iter()
                    .zip(&w)
                    .map(|(&xi, &wi)| (half * (xi + T::one()), half * wi))
                    .unzip()
            }
            Scheme::GaussLegendrePanels { panels, grading } => {
                let panels = panels.min(self.nodes_per_leg / 2).max(1);
                let mut widths = Vec::with_capacity(panels);
                let mut wsum = T::zero();
                let mut w = T::one();
                for _ in 0..panels {
                    widths.push(w);
                    wsum += w;
                    w *= grading;
                }
                let base = self.nodes_per_leg / panels;
                let extra = self.nodes_per_leg % panels;
                let mut r = Vec::with_capacity(self.nodes_per_leg);
                let mut wt = Vec::with_capacity(self.nodes_per_leg);
                let mut left = T::zero();
                for (k, width) in widths.iter().enumerate() {
                    let len = radius * *width / wsum;
                    let n = base + usize::from(k < extra);
                    let (x, w) = gauss_legendre::<T>(n);
                    let half = len / T::lit(2.0);
                    for (xi, wi) in x.iter().zip(&w) {
                        r.push(left + half * (*xi + T::one()));
                        wt.push(half * *wi);
                    }
                    left += len;
                }
                (r, wt)
            }
        }
    }
}

/// Quadrature nodes on a contour with weights that already include `du/(2πi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet<T> {
    pub points: Vec<Complex<T>>,
    pub weights: Vec<Complex<T>>,
}

impl<T: Real> NodeSet<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl<T: Real> Contour<T> {
    /// Ray pair with apex `vertex` and legs at `±angle`, `angle ∈ (0, π)`.
    pub fn ray_pair(vertex: Complex<T>, angle: T) -> Result<Self> {
        if !(angle > T::zero() && angle < T::PI()) {
            return Err(Error::invalid(format!(
                "ray angle must lie in (0, π), got {angle}"
            )));
        }
        if !vertex.re.is_finite() || !vertex.im.is_finite() {
            return Err(Error::invalid("contour vertex must be finite"));
        }
        Ok(Contour {
            kind: ContourKind::RayPair,
            vertex,
            angle,
            orientation: Orientation::Upward,
        })
    }

    /// Upward vertical line `Re u = abscissa`.
    pub fn vertical_line(abscissa: T) -> Self {
        Contour {
            kind: ContourKind::VerticalLine,
            vertex: Complex::new(abscissa, T::zero()),
            angle: T::FRAC_PI_2(),
            orientation: Orientation::Upward,
        }
    }

    /// `{j + r e^{±2πi/3}}`, traversed upward.
    pub fn sigma_left(j: T) -> Self {
        Contour {
            kind: ContourKind::RayPair,
            vertex: Complex::new(j, T::zero()),
            angle: T::lit(2.0) * T::FRAC_PI_3(),
            orientation: Orientation::Upward,
        }
    }

    /// `-Σ_{j,left}`: apex `-j`, legs at `±π/3`, traversed upward.
    pub fn sigma_right(j: T) -> Self {
        Self::sigma_left(j).reflected()
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn family(&self) -> Family {
        let c = self.angle.cos();
        let tol = T::epsilon() * T::lit(16.0);
        if c < -tol {
            Family::Left
        } else if c > tol {
            Family::Right
        } else {
            Family::Vertical
        }
    }

    /// Point-reflection `u ↦ -u`. Upward contours stay upward.
    pub fn reflected(&self) -> Self {
        Contour {
            kind: self.kind,
            vertex: -self.vertex,
            angle: T::PI() - self.angle,
            orientation: self.orientation,
        }
    }

    fn direction(&self, upper: bool) -> Complex<T> {
        let s = if upper {
            self.angle.sin()
        } else {
            -self.angle.sin()
        };
        Complex::new(self.angle.cos(), s)
    }

    /// Point at distance `r` along the upper or lower leg.
    pub fn point(&self, r: T, upper: bool) -> Complex<T> {
        self.vertex + self.direction(upper) * r
    }

    fn sign(&self) -> T {
        match self.orientation {
            Orientation::Upward => T::one(),
            Orientation::Downward => -T::one(),
        }
    }

    /// Nodes for both legs truncated at `radius`; weights include the orientation and `1/(2πi)`.
    pub fn nodes(&self, spec: &QuadSpec<T>, radius: T) -> NodeSet<T> {
        let (r, w) = spec.leg_rule(radius);
        let up = self.direction(true);
        let down = self.direction(false);
        let norm = Complex::new(T::zero(), -T::one() / (T::lit(2.0) * T::PI())) * self.sign();
        let mut points = Vec::with_capacity(2 * r.len());
        let mut weights = Vec::with_capacity(2 * r.len());
        for (ri, wi) in r.iter().zip(&w).rev() {
            points.push(self.vertex + down * *ri);
            weights.push(-down * *wi * norm);
        }
        for (ri, wi) in r.iter().zip(&w) {
            points.push(self.vertex + up * *ri);
            weights.push(up * *wi * norm);
        }
        NodeSet { points, weights }
    }

    /// Smallest distance between the two paths; zero when they cross.
    pub fn distance_to(&self, other: &Contour<T>) -> T {
        let mut best = T::infinity();
        for a in [true, false] {
            for b in [true, false] {
                let d = ray_distance(
                    self.vertex,
                    self.direction(a),
                    other.vertex,
                    other.direction(b),
                );
                best = best.min(d);
            }
        }
        best
    }
}

fn ray_distance<T: Real>(p: Complex<T>, d: Complex<T>, q: Complex<T>, e: Complex<T>) -> T {
    let cross = d.re * e.im - d.im * e.re;
    if cross.abs() > T::epsilon() {
        let w = q - p;
        let s = (w.re * e.im - w.im * e.re) / cross;
        let t = (w.re * d.im - w.im * d.re) / cross;
        if s >= T::zero() && t >= T::zero() {
            return T::zero();
        }
    }
    point_ray_distance(p, q, e).min(point_ray_distance(q, p, d))
}

fn point_ray_distance<T: Real>(x: Complex<T>, origin: Complex<T>, dir: Complex<T>) -> T {
    let w = x - origin;
    let t = (w.re * dir.re + w.im * dir.im).max(T::zero());
    (w - dir * t).norm()
}

/// Affine image `center + factor·c`; orientation and angle are preserved.
pub fn scale_contour<T: Real>(c: &Contour<T>, center: Complex<T>, factor: T) -> Result<Contour<T>> {
    if !(factor > T::zero()) || !factor.is_finite() {
        return Err(Error::invalid(format!(
            "scale factor must be positive, got {factor}"
        )));
    }
    Ok(Contour {
        kind: c.kind,
        vertex: center + c.vertex * factor,
        angle: c.angle,
        orientation: c.orientation,
    })
}

/// Smallest pairwise distance in a contour layout.
pub fn min_separation<T: Real>(contours: &[Contour<T>]) -> T {
    let mut best = T::infinity();
    for (i, a) in contours.iter().enumerate() {
        for b in &contours[i + 1..] {
            best = best.min(a.distance_to(b));
        }
    }
    best
}
