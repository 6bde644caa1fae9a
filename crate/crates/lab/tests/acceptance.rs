//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use kpz_cond::bridge_laws::{
    bridge_tail_closed, bridge_tail_contour, bridge_tail_mc, limit_tail_flat, limit_tail_step,
    sample_limit_fields, Condition, TimePartition,
};
use kpz_cond::contour_quad::rules::gauss_legendre;
use kpz_cond::contour_quad::{integrate, Contour, QuadSpec};
use kpz_cond::kpz_core::{
    qhat1_ratio_flat, qhat1_ratio_step, qhatn_step_smalln, smalln_default_spec, Grid, MultiIndex,
    DEFAULT_Z_RADIUS,
};
use kpz_cond::special::{airy, gaussian_density, kernel_quad};
use kpz_cond::tracy_widom::{log_p_gue, p_gue, PainleveSolution};

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

const SWEEP: [f64; 4] = [10.0, 100.0, 1000.0, 10000.0];
const SEED: u64 = 20_240_601;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn list(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.3e}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gaussian_identity() -> Check {
    let spec = QuadSpec::default();
    let mut worst = 0.0f64;
    for a in [0.25f64, 1.0, 4.0] {
        for b in [-2.0, 0.0, 3.0] {
            let r = integrate(&Contour::vertical_line(0.0), &spec, |u| {
                kernel_quad(u, a, b)
            })
            .map_err(err)?;
            worst = worst.max((r.value.re - gaussian_density(a, b)).abs());
        }
    }
    ensure(worst < 1e-9, format!("max |error| = {worst:.2e}"))
}

fn bridge_triangle() -> Check {
    let mut notes = Vec::new();
    let mut ok = true;
    let p2 = TimePartition::from_interior(&[0.5]).map_err(err)?;
    let mut cases: Vec<(TimePartition, Vec<f64>)> = [-0.5, 0.0, 0.7]
        .iter()
        .map(|&b| (p2.clone(), vec![b]))
        .collect();
    cases.push((
        TimePartition::from_interior(&[0.3, 0.7]).map_err(err)?,
        vec![0.1, -0.1],
    ));
    for (i, (p, b)) in cases.iter().enumerate() {
        let c = bridge_tail_contour(p, b).map_err(err)?;
        let mc = bridge_tail_mc(p, b, 1_000_000, SEED + i as u64).map_err(err)?;
        let z = (c.value - mc.value) / mc.est_error;
        ok &= z.abs() < 3.0;
        let mut note = format!("b={b:?} z={z:+.2}");
        if b.len() == 1 {
            let closed = bridge_tail_closed(p.interior()[0], b[0]).map_err(err)?;
            let d = (c.value - closed).abs();
            ok &= d < 1e-8;
            note += &format!(" |contour-closed|={d:.1e}");
        }
        notes.push(note);
    }
    ensure(ok, notes.join("; "))
}

fn painleve() -> Check {
    let sol = PainleveSolution::standard().map_err(err)?;
    let mut ok = true;
    let mut ratio = 0.0f64;
    for x in [6.0, 8.0, 10.0] {
        let u = sol.eval(x).map_err(err)?.0;
        ratio = ratio.max((u / airy(x).map_err(err)? - 1.0).abs());
    }
    ok &= ratio < 1e-6;
    let n = 4000;
    let (lo, hi) = (sol.x_min(), sol.x_max());
    let mut resid = 0.0f64;
    for i in 1..n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        resid = resid.max(sol.residual(x).map_err(err)?.abs());
    }
    ok &= resid < 1e-7;
    // composite Gauss-Legendre over [-8, 8]; the mass outside is below 1e-12
    let (t, w) = gauss_legendre::<f64>(16);
    let panels = 64;
    let h = 16.0 / panels as f64;
    let mut mass = 0.0;
    for k in 0..panels {
        let mid = -8.0 + h * (k as f64 + 0.5);
        for (ti, wi) in t.iter().zip(&w) {
            mass += 0.5 * h * wi * p_gue(mid + 0.5 * h * ti, &sol).map_err(err)?;
        }
    }
    ok &= (mass - 1.0).abs() < 1e-6;
    let tail = log_p_gue(10.0, &sol).map_err(err)?
        + (4.0 / 3.0) * 10f64.powf(1.5)
        + (80.0 * std::f64::consts::PI).ln();
    ok &= tail.abs() < 0.2;
    ensure(
        ok,
        format!(
            "max|u/Ai-1|={ratio:.1e} residual={resid:.1e} |mass-1|={:.1e} tail offset={tail:+.3}",
            (mass - 1.0).abs()
        ),
    )
}

fn symmetric() -> Grid {
    Grid::from_interior(&[0.5], &[0.0], &[0.0]).expect("valid grid")
}

fn smalln_vanishing() -> Check {
    let g = symmetric();
    let mut worst = 0.0f64;
    for n in [vec![0, 1], vec![1, 0]] {
        let r = qhatn_step_smalln(
            &g,
            &MultiIndex::new(n),
            20.0,
            &smalln_default_spec(),
            DEFAULT_Z_RADIUS,
        )
        .map_err(err)?;
        worst = worst.max(r.value.abs());
    }
    ensure(worst < 1e-6, format!("max |value| = {worst:.1e}"))
}

fn strictly_shrinking(gaps: &[f64]) -> bool {
    gaps.windows(2).all(|w| w[1] < w[0])
}

fn step_sweep() -> Check {
    let g = symmetric();
    let coarse = QuadSpec::default().with_nodes(96);
    let fine = QuadSpec::default().with_nodes(160);
    let mut gaps = Vec::new();
    let mut spread = 0.0f64;
    for l in SWEEP {
        let a = qhat1_ratio_step(&g, l, &coarse).map_err(err)?;
        let b = qhat1_ratio_step(&g, l, &fine).map_err(err)?;
        spread = spread.max((a.value - b.value).abs());
        gaps.push((b.value - 0.25).abs());
    }
    ensure(
        strictly_shrinking(&gaps) && gaps[3] < 0.01 && spread < 1e-6,
        format!("gaps=[{}] resolution spread={spread:.1e}", list(&gaps)),
    )
}

fn asymmetric() -> Check {
    let g = Grid::from_interior(&[0.5], &[0.3], &[0.1]).map_err(err)?;
    let lim = limit_tail_step(&g.limit_query(Condition::Step).map_err(err)?).map_err(err)?;
    let r = qhat1_ratio_step(&g, 1e4, &QuadSpec::default()).map_err(err)?;
    let gap = (r.value - lim.value).abs();
    ensure(
        gap < 0.02,
        format!("ratio={:.6} limit={:.6} gap={gap:.2e}", r.value, lim.value),
    )
}

fn flat_sweep() -> Check {
    let g = symmetric();
    let lim = limit_tail_flat(&g.limit_query(Condition::Flat).map_err(err)?).map_err(err)?;
    let mut gaps = Vec::new();
    for l in SWEEP {
        let r = qhat1_ratio_flat(&g, l, &QuadSpec::default()).map_err(err)?;
        gaps.push((r.value - lim.value).abs());
    }
    ensure(
        strictly_shrinking(&gaps) && gaps[3] < 0.02,
        format!("limit={:.6} gaps=[{}]", lim.value, list(&gaps)),
    )
}

fn suppression() -> Check {
    let g = symmetric();
    let spec = smalln_default_spec();
    let mut ratios = Vec::new();
    for l in [10.0, 20.0] {
        let at = |n: Vec<usize>| {
            qhatn_step_smalln(&g, &MultiIndex::new(n), l, &spec, DEFAULT_Z_RADIUS)
                .map(|r| r.value.abs())
                .map_err(err)
        };
        ratios.push(at(vec![2, 1])? / at(vec![1, 1])?);
    }
    ensure(
        ratios[0] < 1.0 && ratios[1] < ratios[0],
        format!("|(2,1)|/|(1,1)| at L=10,20: [{}]", list(&ratios)),
    )
}

fn vertex_statistics() -> Check {
    let (s, t) = (0.25, 0.75);
    let n = 100_000;
    let fields = sample_limit_fields(&[s, t], Condition::Step, SEED, n).map_err(err)?;
    let mut identity = 0.0f64;
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for f in &fields {
        for j in 0..2 {
            let (vx, vh) = f.vertex(j);
            let scale = f.bridge1[j].abs() + f.bridge2[j].abs() + 1.0;
            identity = identity.max((f.value(j, vx) - vh).abs() / scale);
        }
        a.push(f.vertex(0).1);
        b.push(f.vertex(1).1);
    }
    let nf = n as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / nf, b.iter().sum::<f64>() / nf);
    let prods: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).collect();
    let cov = prods.iter().sum::<f64>() / (nf - 1.0);
    let se = (prods.iter().map(|p| (p - cov).powi(2)).sum::<f64>() / (nf - 1.0) / nf).sqrt();
    let expected = s * (1.0 - t) / 2.0;
    let z = (cov - expected) / se;
    // rounding in (b2-b1)/2 and (b1+b2)/2 is at most a few ulps of the inputs
    ensure(
        z.abs() < 3.0 && identity <= 4.0 * f64::EPSILON,
        format!(
            "cov={cov:.5} expected={expected:.5} z={z:+.2} max relative identity residual={identity:.1e}"
        ),
    )
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let runs: [&[&str]; 7] = [
        &["tw"],
        &["limit", "--seed", "11"],
        &["converge", "--condition", "flat", "--format", "json"],
        &["converge"],
        &["smalln", "--L", "10"],
        &["sample", "--cov", "0.25,0.75"],
        &["sample", "--condition", "flat", "--format", "json"],
    ];
    let mut files = 0;
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let sub = dir.path().join(format!("run{i}_{rep}"));
            std::fs::create_dir(&sub).map_err(err)?;
            let out = sub.join("out");
            let o = Command::new(env!("CARGO_BIN_EXE_kpzlab"))
                .args(*args)
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(err)?;
            if !o.status.success() {
                return Err(format!("{args:?} exited with {:?}", o.status.code()));
            }
            let mut entries: Vec<_> = std::fs::read_dir(&sub)
                .map_err(err)?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<_, _>>()
                .map_err(err)?;
            entries.sort();
            let contents: Vec<(String, Vec<u8>)> = entries
                .iter()
                .map(|p| {
                    let name = p.file_name().unwrap().to_string_lossy().into_owned();
                    (name, std::fs::read(p).unwrap_or_default())
                })
                .collect();
            outputs.push(contents);
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{args:?} differs between runs"));
        }
        files += outputs[0].len();
    }
    Ok(format!(
        "{} invocations, {files} files byte-identical",
        runs.len()
    ))
}

fn main() -> ExitCode {
    let checks: [Criterion; 10] = [
        (
            "gaussian contour identity",
            Duration::from_secs(1),
            gaussian_identity,
        ),
        (
            "bridge oracle triangle",
            Duration::from_secs(30),
            bridge_triangle,
        ),
        ("painleve / airy", Duration::from_secs(10), painleve),
        (
            "small-n vanishing",
            Duration::from_secs(300),
            smalln_vanishing,
        ),
        ("step sweep", Duration::from_secs(300), step_sweep),
        (
            "asymmetric step query",
            Duration::from_secs(300),
            asymmetric,
        ),
        ("flat sweep", Duration::from_secs(600), flat_sweep),
        ("small-n suppression", Duration::from_secs(900), suppression),
        (
            "vertex statistics",
            Duration::from_secs(30),
            vertex_statistics,
        ),
        ("cli determinism", Duration::from_secs(600), determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in checks.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if took <= *budget => (true, d),
            Ok(d) => (false, format!("{d}; over budget {budget:?}")),
            Err(d) => (false, d),
        };
        failed += usize::from(!pass);
        println!(
            "{} [{:>2}] {name} ({:.2}s): {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
