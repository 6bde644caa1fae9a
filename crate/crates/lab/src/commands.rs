use std::time::Instant;

use kpz_cond::bridge_laws::{
    limit_tail_flat, limit_tail_mc, limit_tail_step, sample_limit_fields, Condition,
};
use kpz_cond::kpz_core::{qhat1_ratio_flat, qhat1_ratio_step, qhatn_step_smalln, MultiIndex};
use kpz_cond::tracy_widom::{
    f_flat, f_goe, f_gue, hastings_mcleod, log_f_goe, log_f_gue, log_p_flat, log_p_gue,
    log_tail_asymptote, p_flat, p_gue, PainleveSolution, TailFamily, DEFAULT_X_MIN,
};
use kpz_cond::LawResult;
use serde_json::Value;

use crate::config::Resolved;
use crate::error::{LabError, LabResult};
use crate::output::{Cell, Report, Table};

/// A report plus the convergence verdict of `converge`.
pub struct Outcome {
    pub report: Report,
    pub convergence_failure: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome {
            report,
            convergence_failure: None,
        }
    }
}

fn config_json(r: &Resolved) -> Value {
    serde_json::to_value(r).expect("resolved config serializes")
}

fn millis(r: &Resolved, t: Instant) -> Cell {
    if r.timing {
        Cell::Float(t.elapsed().as_secs_f64() * 1e3)
    } else {
        Cell::Missing
    }
}

/// Tracy–Widom table. Errors are the discrepancy against a solution matched at x = 10 instead of 12.
pub fn tw(r: &Resolved) -> LabResult<Outcome> {
    let main =
        PainleveSolution::standard().map_err(|e| LabError::core("Hastings–McLeod solve", e))?;
    let alt = hastings_mcleod(DEFAULT_X_MIN, 10.0, 2201)
        .map_err(|e| LabError::core("Hastings–McLeod solve", e))?;
    let mut t = Table::new(
        "records",
        &[
            "L",
            "f_gue",
            "f_gue_err",
            "log_f_gue",
            "p_gue",
            "p_gue_err",
            "log_p_gue",
            "f_goe",
            "f_goe_err",
            "log_f_goe",
            "f_flat",
            "p_flat",
            "p_flat_err",
            "log_p_flat",
            "tail_gue",
            "log_tail_gue",
            "tail_ratio_gue",
            "tail_flat",
            "log_tail_flat",
            "tail_ratio_flat",
        ],
    );
    for &l in &r.l {
        let at = |what: &str| format!("{what} at L = {l}");
        let both = |f: fn(f64, &PainleveSolution) -> kpz_cond::Result<f64>,
                    what: &str|
         -> LabResult<(f64, f64)> {
            let a = f(l, &main).map_err(|e| LabError::core(at(what), e))?;
            let b = f(l, &alt).map_err(|e| LabError::core(at(what), e))?;
            Ok((a, (a - b).abs()))
        };
        let (fg, fg_e) = both(f_gue, "F_GUE")?;
        let (pg, pg_e) = both(p_gue, "p_GUE")?;
        let (fo, fo_e) = both(f_goe, "F_GOE")?;
        let (pf, pf_e) = both(p_flat, "p_flat")?;
        let ff = f_flat(l, &main).map_err(|e| LabError::core(at("F_flat"), e))?;
        let lfg = log_f_gue(l, &main).map_err(|e| LabError::core(at("log F_GUE"), e))?;
        let lpg = log_p_gue(l, &main).map_err(|e| LabError::core(at("log p_GUE"), e))?;
        let lfo = log_f_goe(l, &main).map_err(|e| LabError::core(at("log F_GOE"), e))?;
        let lpf = log_p_flat(l, &main).map_err(|e| LabError::core(at("log p_flat"), e))?;
        // the asymptotes are defined for L > 0 only
        let tail = |fam: TailFamily, log_p: f64| -> (Cell, Cell, Cell) {
            if l > 0.0 {
                let lt = log_tail_asymptote(fam, l).expect("L > 0");
                (lt.exp().into(), lt.into(), (log_p - lt).exp().into())
            } else {
                (Cell::Missing, Cell::Missing, Cell::Missing)
            }
        };
        let (tg, ltg, rg) = tail(TailFamily::GueDensity, lpg);
        let (tf, ltf, rf) = tail(TailFamily::FlatDensity, lpf);
        t.push(vec![
            l.into(),
            fg.into(),
            fg_e.into(),
            lfg.into(),
            pg.into(),
            pg_e.into(),
            lpg.into(),
            fo.into(),
            fo_e.into(),
            lfo.into(),
            ff.into(),
            pf.into(),
            pf_e.into(),
            lpf.into(),
            tg,
            ltg,
            rg,
            tf,
            ltf,
            rf,
        ]);
    }
    Ok(Report {
        command: "tw",
        config: config_json(r),
        tables: vec![t],
    }
    .into())
}

fn contour_limit(cond: Condition, r: &Resolved) -> LabResult<LawResult> {
    let q = r
        .grid()
        .limit_query(cond)
        .map_err(|e| LabError::core("limit query", e))?;
    let res = match cond {
        Condition::Step => limit_tail_step(&q),
        Condition::Flat => limit_tail_flat(&q),
    };
    res.map_err(|e| LabError::core(format!("{cond} limit law"), e))
}

/// Contour and Monte Carlo values of the limit law, plus the step/flat comparison.
pub fn limit(r: &Resolved) -> LabResult<Outcome> {
    let q = r
        .grid()
        .limit_query(r.condition)
        .map_err(|e| LabError::core("limit query", e))?;
    let contour = contour_limit(r.condition, r)?;
    let mc =
        limit_tail_mc(&q, r.mc_samples, r.seed).map_err(|e| LabError::core("Monte Carlo", e))?;
    let sigma = (contour.est_error.powi(2) + mc.est_error.powi(2)).sqrt();
    let z = if sigma > 0.0 {
        Some((mc.value - contour.value) / sigma)
    } else {
        None
    };
    let mut t = Table::new(
        "records",
        &[
            "condition",
            "backend",
            "value",
            "est_error",
            "imag_residual",
            "samples",
            "seed",
            "z_score",
        ],
    );
    let cond = r.condition.to_string();
    t.push(vec![
        cond.as_str().into(),
        "contour".into(),
        contour.value.into(),
        contour.est_error.into(),
        contour.imag_residual.into(),
        Cell::Missing,
        Cell::Missing,
        Cell::Missing,
    ]);
    t.push(vec![
        cond.as_str().into(),
        "monte_carlo".into(),
        mc.value.into(),
        mc.est_error.into(),
        0.0.into(),
        r.mc_samples.into(),
        r.seed.into(),
        z.into(),
    ]);
    let step = contour_limit(Condition::Step, r)?;
    let flat = contour_limit(Condition::Flat, r)?;
    let mut cmp = Table::new(
        "comparison",
        &[
            "step_value",
            "step_est_error",
            "flat_value",
            "flat_est_error",
            "flat_minus_step",
            "difference_est_error",
        ],
    );
    cmp.push(vec![
        step.value.into(),
        step.est_error.into(),
        flat.value.into(),
        flat.est_error.into(),
        (flat.value - step.value).into(),
        (step.est_error + flat.est_error).into(),
    ]);
    Ok(Report {
        command: "limit",
        config: config_json(r),
        tables: vec![t, cmp],
    }
    .into())
}

/// Normalized finite-L ratio against the limit law; flags gaps that grow beyond the error slack.
pub fn converge(r: &Resolved) -> LabResult<Outcome> {
    let grid = r.grid();
    let spec = r.quad_spec();
    let lim = contour_limit(r.condition, r)?;
    let mut t = Table::new(
        "records",
        &[
            "L",
            "finite_L_value",
            "limit_value",
            "abs_gap",
            "est_error",
            "limit_est_error",
            "imag_residual",
            "wall_time_ms",
        ],
    );
    let mut gaps = Vec::new();
    for &l in &r.l {
        let start = Instant::now();
        let res = match r.condition {
            Condition::Step => qhat1_ratio_step(&grid, l, &spec),
            Condition::Flat => qhat1_ratio_flat(&grid, l, &spec),
        }
        .map_err(|e| LabError::core(format!("{} ratio at L = {l}", r.condition), e))?;
        let gap = (res.value - lim.value).abs();
        gaps.push((l, gap, res.est_error));
        t.push(vec![
            l.into(),
            res.value.into(),
            lim.value.into(),
            gap.into(),
            res.est_error.into(),
            lim.est_error.into(),
            res.imag_residual.into(),
            millis(r, start),
        ]);
    }
    let failure = gaps
        .windows(2)
        .find(|w| w[1].1 > w[0].1 + w[0].2 + w[1].2)
        .map(|w| {
            format!(
                "abs_gap grew from {:e} at L = {} to {:e} at L = {}",
                w[0].1, w[0].0, w[1].1, w[1].0
            )
        });
    Ok(Outcome {
        report: Report {
            command: "converge",
            config: config_json(r),
            tables: vec![t],
        },
        convergence_failure: failure,
    })
}

/// Multi-indices tabulated by `smalln`.
pub const SMALLN_INDICES: [(usize, usize); 5] = [(0, 1), (1, 0), (1, 1), (2, 1), (1, 2)];

/// Small-n terms at each L with their magnitude relative to `n = (1,1)`.
pub fn smalln(r: &Resolved) -> LabResult<Outcome> {
    let grid = r.grid();
    let spec = r.quad_spec();
    let mut t = Table::new(
        "records",
        &[
            "L",
            "n",
            "value",
            "est_error",
            "imag_residual",
            "log_scale",
            "ratio_to_unit",
            "ratio_est_error",
            "wall_time_ms",
        ],
    );
    for &l in &r.l {
        let eval = |n: (usize, usize)| -> LabResult<(LawResult, Cell)> {
            let idx = MultiIndex::new(vec![n.0, n.1]);
            let start = Instant::now();
            let res = qhatn_step_smalln(&grid, &idx, l, &spec, r.z_radius)
                .map_err(|e| LabError::core(format!("Q̂ for n = {idx} at L = {l}"), e))?;
            Ok((res, millis(r, start)))
        };
        let (unit, _) = eval((1, 1))?;
        for n in SMALLN_INDICES {
            let (res, ms) = eval(n)?;
            let ratio = (res.value / unit.value).abs();
            let ratio_err = (res.est_error + ratio * unit.est_error) / unit.value.abs();
            t.push(vec![
                l.into(),
                format!("({},{})", n.0, n.1).into(),
                res.value.into(),
                res.est_error.into(),
                res.imag_residual.into(),
                res.log_scale.into(),
                ratio.into(),
                ratio_err.into(),
                ms,
            ]);
        }
    }
    Ok(Report {
        command: "smalln",
        config: config_json(r),
        tables: vec![t],
    }
    .into())
}

/// Empirical covariance with the standard error of the mean of the centred products.
fn covariance(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let prods: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let c = prods.iter().sum::<f64>() / (n - 1.0);
    let var = prods.iter().map(|p| (p - c).powi(2)).sum::<f64>() / (n - 1.0);
    (c, (var / n).sqrt())
}

/// Sample paths and vertex processes; the optional covariance table checks the vertex law.
pub fn sample(r: &Resolved) -> LabResult<Outcome> {
    let fields = sample_limit_fields(&r.taus, r.condition, r.seed, r.count)
        .map_err(|e| LabError::core("sampler", e))?;
    let mut t = Table::new(
        "records",
        &[
            "sample",
            "stream",
            "tau",
            "bridge1",
            "bridge2",
            "z",
            "shift",
            "vertex_x",
            "vertex_h",
            "graph_at_vertex",
            "identity_residual",
        ],
    );
    let mut worst = 0.0f64;
    for (i, f) in fields.iter().enumerate() {
        for (j, &tau) in f.taus.iter().enumerate() {
            let (vx, vh) = f.vertex(j);
            let g = f.value(j, vx);
            worst = worst.max((g - vh).abs());
            t.push(vec![
                i.into(),
                f.stream.into(),
                tau.into(),
                f.bridge1[j].into(),
                f.bridge2[j].into(),
                f.z.into(),
                f.shift(j).into(),
                vx.into(),
                vh.into(),
                g.into(),
                (g - vh).into(),
            ]);
        }
    }
    let mut tables = vec![t];
    if let Some((s, u)) = r.cov {
        let js = r.taus.iter().position(|&v| v == s).expect("validated");
        let ju = r.taus.iter().position(|&v| v == u).expect("validated");
        let mut c = Table::new(
            "covariance",
            &[
                "component",
                "s",
                "t",
                "samples",
                "cov",
                "std_error",
                "expected",
                "z_score",
                "max_identity_residual",
            ],
        );
        let flat = r.condition == Condition::Flat;
        for (name, pick, expected) in [
            (
                "vertex_x",
                0usize,
                // (B₂ − B₁)/2 has covariance s(1−t)/2; the flat tilt adds (1−s)(1−t)/2
                s * (1.0 - u) / 2.0
                    + if flat {
                        (1.0 - s) * (1.0 - u) / 2.0
                    } else {
                        0.0
                    },
            ),
            ("vertex_h", 1usize, s * (1.0 - u) / 2.0),
        ] {
            let comp = |j: usize| -> Vec<f64> {
                fields
                    .iter()
                    .map(|f| {
                        let v = f.vertex(j);
                        if pick == 0 {
                            v.0
                        } else {
                            v.1
                        }
                    })
                    .collect()
            };
            let (cv, se) = covariance(&comp(js), &comp(ju));
            c.push(vec![
                name.into(),
                s.into(),
                u.into(),
                r.count.into(),
                cv.into(),
                se.into(),
                expected.into(),
                ((cv - expected) / se).into(),
                worst.into(),
            ]);
        }
        tables.push(c);
    }
    Ok(Report {
        command: "sample",
        config: config_json(r),
        tables,
    }
    .into())
}
