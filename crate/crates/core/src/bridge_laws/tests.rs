use proptest::prelude::*;

use super::*;
use crate::contour_quad::rules::gauss_legendre;
use crate::contour_quad::QuadSpec;
use crate::special::{gaussian_density, normal_cdf, normal_sf};

fn part(interior: &[f64]) -> TimePartition {
    TimePartition::from_interior(interior).unwrap()
}

fn step(taus: &[f64], xs: &[f64], hs: &[f64]) -> LimitQuery {
    LimitQuery::new(taus.to_vec(), xs.to_vec(), hs.to_vec(), Condition::Step).unwrap()
}

fn flat(taus: &[f64], xs: &[f64], hs: &[f64]) -> LimitQuery {
    LimitQuery::new(taus.to_vec(), xs.to_vec(), hs.to_vec(), Condition::Flat).unwrap()
}

#[test]
fn partition_validation() {
    assert!(TimePartition::from_interior(&[0.5, 0.5]).is_err());
    assert!(TimePartition::from_interior(&[1.2]).is_err());
    assert!(TimePartition::new(vec![0.1, 1.0]).is_err());
    let p = part(&[0.3, 0.7]);
    assert_eq!(p.intervals(), 3);
    assert!(bridge_joint_density(&p, &[0.1]).is_err());
}

#[test]
fn joint_density_examples() {
    let d = bridge_joint_density(&part(&[0.5]), &[0.0]).unwrap();
    assert!((d - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-15);
    let (x, w) = gauss_legendre::<f64>(80);
    for a in [0.2, 0.5, 0.85] {
        let p = part(&[a]);
        let mass: f64 = x
            .iter()
            .zip(&w)
            .map(|(x, w)| 6.0 * w * bridge_joint_density(&p, &[6.0 * x]).unwrap())
            .sum();
        assert!((mass - 1.0).abs() < 1e-12, "a = {a}: {mass}");
    }
    // sequential Gaussian transition kernels
    let (a1, a2, b1, b2) = (0.3, 0.7, 0.25, -0.4);
    let first = gaussian_density(a1 * (1.0 - a1), b1);
    let second = gaussian_density(
        (a2 - a1) * (1.0 - a2) / (1.0 - a1),
        b2 - b1 * (1.0 - a2) / (1.0 - a1),
    );
    let d = bridge_joint_density(&part(&[a1, a2]), &[b1, b2]).unwrap();
    assert!((d - first * second).abs() < 1e-14);
}

#[test]
fn closed_tail_examples() {
    assert_eq!(bridge_tail_closed(0.5, 0.0).unwrap(), 0.5);
    assert!(bridge_tail_closed(0.5, 40.0).unwrap() < 1e-300);
    assert!(bridge_tail_closed(1.0, 0.0).is_err());
}

#[test]
fn contour_matches_closed_form() {
    for b in [-0.5, 0.0, 0.7] {
        let c = bridge_tail_contour(&part(&[0.5]), &[b]).unwrap();
        let want = bridge_tail_closed(0.5, b).unwrap();
        assert!(
            (c.value - want).abs() < 1e-8,
            "b = {b}: {} vs {want}",
            c.value
        );
        assert!(c.imag_residual < 1e-8);
    }
    let half = bridge_tail_contour(&part(&[0.5]), &[0.0]).unwrap();
    assert!((half.value - 0.5).abs() < 1e-12);
}

#[test]
fn contour_vanishes_for_high_levels() {
    let v = bridge_tail_contour(&part(&[0.3, 0.7]), &[6.0, 6.0]).unwrap();
    assert!(v.value.abs() < 1e-12, "{}", v.value);
    let v = bridge_tail_contour(&part(&[0.5]), &[6.0]).unwrap();
    assert!(v.value.abs() < 1e-12);
}

#[test]
fn contour_layout_invariance() {
    let p = part(&[0.3, 0.7]);
    let b = [0.1, -0.1];
    let spec = QuadSpec::default();
    let base = bridge_tail_contour(&p, &b).unwrap().value;
    for (abscissa, spacing) in [
        (-0.7f64, 1.0f64),
        (0.5, 1.0),
        (0.0, 0.3),
        (0.0, 2.0),
        (-1.0, 0.6),
    ] {
        // nodes scale with the inverse line gap so the 1/(v−u) link stays resolved
        let nodes = ((96.0 / spacing).ceil() as usize).max(96);
        let spec = spec.with_nodes(nodes);
        let v = bridge_tail_contour_with(&p, &b, LineLayout { abscissa, spacing }, &spec)
            .unwrap()
            .value;
        assert!(
            (v - base).abs() < 1e-8,
            "({abscissa}, {spacing}): {v} vs {base}"
        );
    }
}

#[test]
fn reversibility() {
    let fwd = bridge_tail_contour(&part(&[0.2, 0.5, 0.9]), &[0.1, -0.2, 0.05])
        .unwrap()
        .value;
    let rev = bridge_tail_contour(&part(&[0.1, 0.5, 0.8]), &[0.05, -0.2, 0.1])
        .unwrap()
        .value;
    assert!((fwd - rev).abs() < 1e-9);
}

#[test]
fn too_many_intervals() {
    let p = part(&[0.1, 0.2, 0.3, 0.4, 0.5]);
    assert!(matches!(
        bridge_tail_contour(&p, &[0.0; 5]),
        Err(crate::Error::DimensionTooLarge { dim: 6, max: 5 })
    ));
}

#[test]
fn monte_carlo_agrees_and_is_reproducible() {
    let p = part(&[0.3, 0.7]);
    let b = [0.1, -0.1];
    let c = bridge_tail_contour(&p, &b).unwrap();
    let mc = bridge_tail_mc(&p, &b, 200_000, 7).unwrap();
    assert!(
        (mc.value - c.value).abs() < 3.0 * mc.est_error,
        "{} vs {}",
        mc.value,
        c.value
    );
    assert_eq!(mc, bridge_tail_mc(&p, &b, 200_000, 7).unwrap());
    let m2 = bridge_tail_mc(&part(&[0.5]), &[0.0], 100_000, 1).unwrap();
    assert!((m2.value - 0.5).abs() < 3.0 * m2.est_error);
    let t = bridge_tail_mc(&part(&[0.3]), &[-0.2], 100_000, 3).unwrap();
    assert!((t.value - bridge_tail_closed(0.3, -0.2).unwrap()).abs() < 3.0 * t.est_error);
}

#[test]
fn step_limit_examples() {
    let v = limit_tail_step(&step(&[0.5], &[0.0], &[0.0])).unwrap();
    assert!((v.value - 0.25).abs() < 1e-12);
    let v = limit_tail_step(&step(&[0.5], &[0.3], &[0.0])).unwrap();
    let want = normal_sf(-0.6) * normal_sf(0.6);
    assert!((v.value - want).abs() < 1e-9);
    let tied = limit_tail_step(&step(&[0.5, 0.5], &[0.0, 0.0], &[0.1, 0.2])).unwrap();
    let single = limit_tail_step(&step(&[0.5], &[0.0], &[0.2])).unwrap();
    assert!((tied.value - single.value).abs() < 1e-15);
    let wrong = flat(&[0.5], &[0.0], &[0.0]);
    assert!(limit_tail_step(&wrong).is_err());
}

#[test]
fn step_limit_factorizes_and_matches_joint_mc() {
    let q = step(&[0.3, 0.6], &[0.2, -0.1], &[0.05, 0.1]);
    let v = limit_tail_step(&q).unwrap();
    let p = part(&[0.3, 0.6]);
    let one = bridge_tail_contour(&p, &[0.05 - 0.2, 0.1 + 0.1])
        .unwrap()
        .value;
    let two = bridge_tail_contour(&p, &[0.05 + 0.2, 0.1 - 0.1])
        .unwrap()
        .value;
    assert_eq!(v.value, one * two);
    let mc = limit_tail_mc(&q, 200_000, 11).unwrap();
    assert!((mc.value - v.value).abs() < 3.0 * mc.est_error);
}

#[test]
fn flat_limit_matches_scalar_oracle() {
    let v = limit_tail_flat(&flat(&[0.5], &[0.0], &[0.0])).unwrap();
    let closed = 0.25 + (-1.0f64 / 3.0).asin() / (2.0 * std::f64::consts::PI);
    assert!((v.value - closed).abs() < 1e-9, "{} vs {closed}", v.value);
    let (x, w) = gauss_legendre::<f64>(200);
    let oracle: f64 = x
        .iter()
        .zip(&w)
        .map(|(x, w)| {
            let z = 12.0 * x;
            let s = z / (2.0 * std::f64::consts::SQRT_2 * 0.5);
            12.0 * w * (-z * z / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()
                * normal_sf(-s)
                * normal_cdf(-s)
        })
        .sum();
    assert!((v.value - oracle).abs() < 1e-9);
    let q = flat(&[0.5], &[0.0], &[0.0]);
    let mc = limit_tail_mc(&q, 200_000, 5).unwrap();
    assert!((mc.value - v.value).abs() < 3.0 * mc.est_error);
}

#[test]
fn flat_point_mass_reduces_to_step() {
    let f = flat(&[0.4, 0.8], &[0.1, 0.0], &[0.0, 0.2]);
    let s = step(&[0.4, 0.8], &[0.1, 0.0], &[0.0, 0.2]);
    let spec = QuadSpec::default();
    let a = limit_tail_flat_with(&f, ZRule::PointMass(0.0), &spec)
        .unwrap()
        .value;
    let b = limit_tail_step(&s).unwrap().value;
    assert_eq!(a, b);
}

#[test]
fn flat_below_step_at_origin() {
    for tau in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let f = limit_tail_flat(&flat(&[tau], &[0.0], &[0.0]))
            .unwrap()
            .value;
        let s = limit_tail_step(&step(&[tau], &[0.0], &[0.0]))
            .unwrap()
            .value;
        assert!(f <= s, "tau = {tau}");
    }
}

#[test]
fn samples_satisfy_vertex_identity() {
    let taus = [0.1, 0.25, 0.5, 0.75, 0.9];
    for condition in [Condition::Step, Condition::Flat] {
        for s in sample_limit_fields(&taus, condition, 42, 200).unwrap() {
            assert_eq!(s.z.is_some(), condition == Condition::Flat);
            for j in 0..taus.len() {
                let (v1, v2) = s.vertex(j);
                let scale = v1.abs().max(v2.abs()).max(1.0);
                assert!((s.value(j, v1) - v2).abs() <= 4.0 * f64::EPSILON * scale);
                for x in [-1.0, 0.0, 0.4] {
                    let branch = s.bridge1[j] + x + s.shift(j);
                    assert!(s.value(j, x) <= branch);
                }
            }
        }
    }
    assert!(sample_limit_field(&[0.5, 0.5], Condition::Step, 1).is_err());
    assert_eq!(
        sample_limit_field(&taus, Condition::Flat, 9).unwrap(),
        sample_limit_field(&taus, Condition::Flat, 9).unwrap()
    );
}

#[test]
fn vertex_covariance() {
    let (s, t) = (0.25, 0.75);
    let n = 20_000;
    let samples = sample_limit_fields(&[s, t], Condition::Step, 3, n).unwrap();
    let pairs: Vec<(f64, f64)> = samples
        .iter()
        .map(|f| (f.vertex(0).1, f.vertex(1).1))
        .collect();
    let cov = pairs.iter().map(|(a, b)| a * b).sum::<f64>() / n as f64;
    let se = (pairs
        .iter()
        .map(|(a, b)| (a * b - cov).powi(2))
        .sum::<f64>()
        / n as f64
        / n as f64)
        .sqrt();
    assert!((cov - s * (1.0 - t) / 2.0).abs() < 3.0 * se, "{cov} ± {se}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn contour_tail_matches_closed_form(a in 0.1f64..0.9, b in -1.0f64..1.0) {
        let c = bridge_tail_contour(&part(&[a]), &[b]).unwrap();
        prop_assert!((c.value - bridge_tail_closed(a, b).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn flat_tilt_zero_is_step(tau in 0.05f64..0.95, x in -0.5f64..0.5, h in -0.5f64..0.5) {
        let spec = QuadSpec::default();
        let f = limit_tail_flat_with(&flat(&[tau], &[x], &[h]), ZRule::PointMass(0.0), &spec).unwrap().value;
        let s = limit_tail_step(&step(&[tau], &[x], &[h])).unwrap().value;
        prop_assert_eq!(f, s);
    }
}
