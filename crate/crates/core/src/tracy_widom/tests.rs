use std::sync::OnceLock;

use super::*;
use crate::contour_quad::rules::gauss_legendre;
use crate::special::{airy, airy_pair};

fn sol() -> &'static PainleveSolution {
    static SOL: OnceLock<PainleveSolution> = OnceLock::new();
    SOL.get_or_init(|| PainleveSolution::standard().unwrap())
}

fn integrate(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_legendre::<f64>(20);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let left = a + h * p as f64;
        for (xi, wi) in x.iter().zip(&w) {
            s += 0.5 * h * wi * f(left + 0.5 * h * (xi + 1.0));
        }
    }
    s
}

/// Newton iteration on a second-order finite-difference discretisation of the
/// boundary value problem on `[-8, 12]`.
fn bvp_oracle(h: f64) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (-8.0f64, 12.0);
    let n = ((b - a) / h).round() as usize;
    let x: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
    let left = (-a / 2.0).sqrt() * (1.0 + 1.0 / (8.0 * a * a * a));
    let mut u: Vec<f64> = x
        .iter()
        .map(|&t| {
            if t < 0.0 {
                (-t / 2.0).sqrt() + 0.37 * t.exp()
            } else {
                0.37 * (-t).exp()
            }
        })
        .collect();
    u[0] = left;
    u[n] = airy(b).unwrap();
    let h2 = h * h;
    for _ in 0..50 {
        let m = n - 1;
        let mut diag = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for i in 1..n {
            let r = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / h2 - 2.0 * u[i].powi(3) - x[i] * u[i];
            diag[i - 1] = -2.0 / h2 - 6.0 * u[i] * u[i] - x[i];
            rhs[i - 1] = -r;
        }
        let off = 1.0 / h2;
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        c[0] = off / diag[0];
        d[0] = rhs[0] / diag[0];
        for i in 1..m {
            let den = diag[i] - off * c[i - 1];
            c[i] = off / den;
            d[i] = (rhs[i] - off * d[i - 1]) / den;
        }
        let mut delta = vec![0.0; m];
        delta[m - 1] = d[m - 1];
        for i in (0..m - 1).rev() {
            delta[i] = d[i] - c[i] * delta[i + 1];
        }
        let step: f64 = delta.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for i in 1..n {
            u[i] += delta[i - 1];
        }
        if step < 1e-13 {
            break;
        }
    }
    (x, u)
}

fn airy_kernel(x: f64, y: f64) -> f64 {
    let (ax, dx) = airy_pair(x).unwrap();
    if (x - y).abs() < 1e-12 {
        return dx * dx - x * ax * ax;
    }
    let (ay, dy) = airy_pair(y).unwrap();
    (ax * dy - dx * ay) / (x - y)
}

fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Nyström discretisation of `det(I − K_Ai)` on `L²(s, ∞)`.
fn fredholm_f_gue(s: f64) -> f64 {
    let (x, w) = gauss_legendre::<f64>(60);
    let hi = s + 16.0;
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(&w)
        .map(|(xi, wi)| (s + 0.5 * (hi - s) * (xi + 1.0), 0.5 * (hi - s) * wi))
        .collect();
    let m: Vec<Vec<f64>> = pts
        .iter()
        .enumerate()
        .map(|(i, (xi, wi))| {
            pts.iter()
                .enumerate()
                .map(|(j, (xj, wj))| {
                    f64::from(i == j) - wi.sqrt() * airy_kernel(*xi, *xj) * wj.sqrt()
                })
                .collect()
        })
        .collect();
    determinant(m)
}

#[test]
fn boundary_condition_at_match_point() {
    let s = hastings_mcleod(-2.0, 8.0, 11).unwrap();
    let (u, _) = s.eval(8.0).unwrap();
    assert!((u / airy(8.0).unwrap() - 1.0).abs() < 1e-12);
    assert!((s.u_values[0] / airy(8.0).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn follows_airy_in_right_tail() {
    for x in [6.0, 8.0, 10.0] {
        let (u, _) = sol().eval(x).unwrap();
        assert!((u / airy(x).unwrap() - 1.0).abs() < 1e-6, "x = {x}");
    }
}

#[test]
fn positive_and_decreasing() {
    let s = sol();
    assert!(s.u_values.iter().all(|&u| u > 0.0));
    assert!(s.u_values.windows(2).all(|p| p[0] < p[1]));
    assert!(s.u_prime_values.iter().all(|&d| d < 0.0));
    assert!(s.grid.windows(2).all(|p| p[0] > p[1]));
}

#[test]
fn ode_residual_is_small() {
    let s = sol();
    let worst = (0..4000)
        .map(|i| -9.99 + 21.9 * i as f64 / 4000.0)
        .map(|x| s.residual(x).unwrap().abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-7, "{worst:e}");
}

#[test]
fn matches_boundary_value_oracle() {
    let (x, u) = bvp_oracle(0.004);
    let s = sol();
    for probe in [-4.0, -1.0, 0.0, 1.5, 4.0] {
        let i = x.iter().position(|&t| (t - probe).abs() < 1e-9).unwrap();
        let (v, _) = s.eval(probe).unwrap();
        assert!((v - u[i]).abs() < 1e-5, "x = {probe}: {v} vs {}", u[i]);
    }
    let (u0, _) = s.eval(0.0).unwrap();
    assert!((u0 - 0.367_061_551_548).abs() < 1e-8, "{u0}");
}

#[test]
fn match_point_independence() {
    let wide = hastings_mcleod(-6.0, 16.0, 3).unwrap();
    let a = wide.eval(0.0).unwrap().0;
    let b = sol().eval(0.0).unwrap().0;
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn rejects_bad_ranges() {
    assert!(hastings_mcleod(-12.0, 12.0, 10).is_err());
    assert!(hastings_mcleod(-5.0, 6.0, 10).is_err());
    assert!(hastings_mcleod(-5.0, 12.0, 1).is_err());
    assert!(matches!(
        f_gue(-11.0, sol()),
        Err(crate::Error::InsufficientRange { .. })
    ));
}

#[test]
fn gue_distribution_limits_and_monotonicity() {
    let s = sol();
    assert!(f_gue(10.0, s).unwrap() >= 1.0 - 1e-10);
    assert!(f_gue(8.0, s).unwrap() > 1.0 - 1e-10);
    assert!(f_gue(-8.0, s).unwrap() < 1e-12);
    assert!(f_gue(-0.5, s).unwrap() - f_gue(-1.5, s).unwrap() > 0.0);
    let vals: Vec<f64> = (0..161)
        .map(|i| f_gue(-8.0 + 0.1 * i as f64, s).unwrap())
        .collect();
    assert!(vals.windows(2).all(|p| p[0] <= p[1]));
    assert!(vals.iter().all(|v| (0.0..=1.0).contains(v)));
}

#[test]
fn gue_matches_fredholm_determinant() {
    for l in [-2.0, 0.0, 1.0] {
        let want = fredholm_f_gue(l);
        let got = f_gue(l, sol()).unwrap();
        assert!((got - want).abs() < 1e-6, "L = {l}: {got} vs {want}");
    }
}

#[test]
fn densities_normalize() {
    let s = sol();
    let gue = integrate(-8.0, 8.0, 64, |l| p_gue(l, s).unwrap());
    assert!((gue - 1.0).abs() < 1e-6, "{gue}");
    let goe = integrate(-10.0, 12.0, 88, |l| p_goe(l, s).unwrap());
    assert!((goe - 1.0).abs() < 1e-6, "{goe}");
    let flat = integrate(-6.0, 8.0, 56, |l| p_flat(l, s).unwrap());
    assert!((flat - 1.0).abs() < 1e-6, "{flat}");
}

#[test]
fn densities_match_finite_differences() {
    let s = sol();
    let h = 1e-3;
    for l in [-1.0, 0.0, 1.0] {
        let fd = (f_gue(l + h, s).unwrap() - f_gue(l - h, s).unwrap()) / (2.0 * h);
        assert!((fd - p_gue(l, s).unwrap()).abs() < 1e-6);
        let fd = (f_goe(l + h, s).unwrap() - f_goe(l - h, s).unwrap()) / (2.0 * h);
        assert!((fd - p_goe(l, s).unwrap()).abs() < 1e-6);
        let fd = (f_flat(l + h, s).unwrap() - f_flat(l - h, s).unwrap()) / (2.0 * h);
        assert!((fd - p_flat(l, s).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn goe_is_dominated_by_gue() {
    let s = sol();
    for i in 0..100 {
        let l = -9.0 + 0.2 * i as f64;
        assert!(f_goe(l, s).unwrap().powi(2) <= f_gue(l, s).unwrap() * (1.0 + 1e-14));
    }
}

#[test]
fn right_tails_follow_asymptotes() {
    let s = sol();
    let gue = p_gue(10.0, s).unwrap() / tail_asymptote(TailFamily::GueDensity, 10.0).unwrap();
    assert!((gue - 1.0).abs() < 0.1, "{gue}");
    let goe = p_goe(10.0, s).unwrap() / tail_asymptote(TailFamily::GoeDensity, 10.0).unwrap();
    assert!((goe - 1.0).abs() < 0.1, "{goe}");
    let flat = p_flat(8.0, s).unwrap() / tail_asymptote(TailFamily::FlatDensity, 8.0).unwrap();
    assert!((flat - 1.0).abs() < 0.1, "{flat}");
    let gaps: Vec<f64> = [4.0, 6.0, 8.0, 10.0]
        .iter()
        .map(|&l| {
            (log_p_gue(l, s).unwrap() - log_tail_asymptote(TailFamily::GueDensity, l).unwrap())
                .abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|p| p[1] < p[0]), "{gaps:?}");
    assert!(gaps[3] < 0.2);
}

#[test]
fn tail_asymptote_closed_forms() {
    let pi = std::f64::consts::PI;
    let gue = tail_asymptote(TailFamily::GueDensity, 1.0).unwrap();
    assert!((gue - (-4.0f64 / 3.0).exp() / (8.0 * pi)).abs() < 1e-17);
    assert!((gue - 0.010_488_2).abs() < 1e-7);
    let flat = tail_asymptote(TailFamily::FlatDensity, 1.0).unwrap();
    assert!((flat - (8.0 * pi).powf(-0.5) * (-4.0f64 / 3.0).exp()).abs() < 1e-16);
    assert!(tail_asymptote(TailFamily::GoeDensity, 0.0).is_err());
    for family in [
        TailFamily::GueDensity,
        TailFamily::FlatDensity,
        TailFamily::GoeDensity,
    ] {
        let t = TailAsymptote::new(family);
        let ex: Vec<f64> = (1..=60).map(|l| t.exponent(l as f64)).collect();
        assert!(ex.windows(2).all(|p| p[1] < p[0]));
        assert!(t.log_value(60.0).unwrap().is_finite());
    }
    assert_eq!(
        TailAsymptote::new(TailFamily::GoeDensity).exponent(4.0),
        -(2.0 / 3.0) * 8.0
    );
}
