//! Experiment configuration: a JSON file and command-line flags with the same keys.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use kpz_cond::bridge_laws::Condition;
use kpz_cond::kpz_core::Grid;
use kpz_cond::QuadSpec64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "kpzlab",
    version,
    about = "Conditional KPZ fixed point experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Tracy–Widom distribution functions, densities and tail asymptotes on an L grid.
    Tw,
    /// Limit law of the grid query by contour quadrature and Monte Carlo.
    Limit,
    /// Normalized finite-L ratio against the limit law over an L sweep.
    Converge,
    /// Small multi-index terms at m = 2: vanishing and suppression.
    Smalln,
    /// Joint samples of the limit field and its vertex process.
    Sample,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Tw => "tw",
            Command::Limit => "limit",
            Command::Converge => "converge",
            Command::Smalln => "smalln",
            Command::Sample => "sample",
        }
    }
}

/// Flags shared by every subcommand; each overrides the same key of `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON config file with the same keys as the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// JSON grid file `{"taus": [...], "xs": [...], "hs": [...]}`.
    #[arg(long, global = true)]
    pub grid: Option<PathBuf>,
    #[arg(long, global = true)]
    pub condition: Option<Condition>,
    /// Comma-separated L values.
    #[arg(
        long = "L",
        global = true,
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub l: Option<Vec<f64>>,
    /// Quadrature nodes per contour leg.
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Truncation radius of the contour legs.
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// Radius of the z circle in the small-n evaluator.
    #[arg(long = "z-radius", global = true)]
    pub z_radius: Option<f64>,
    #[arg(long = "mc-samples", global = true)]
    pub mc_samples: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Sampling times for `sample`, comma-separated inside (0, 1).
    #[arg(long, global = true, value_delimiter = ',')]
    pub taus: Option<Vec<f64>>,
    /// Number of samples for `sample`.
    #[arg(long, global = true)]
    pub count: Option<usize>,
    /// Pair `s,t` of sampling times for the empirical vertex covariance.
    #[arg(long, global = true, value_delimiter = ',')]
    pub cov: Option<Vec<f64>>,
    /// Record wall time per record; output is then no longer reproducible byte for byte.
    #[arg(long, global = true)]
    pub timing: bool,
    /// Size of the worker pool; 0 lets rayon decide.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

/// Grid given inline in a config file, or as a path to a grid file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSource {
    Inline(GridSpec),
    Path(PathBuf),
}

/// `taus` either ends at 1 (full grid) or lists interior points only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub taus: Vec<f64>,
    pub xs: Vec<f64>,
    pub hs: Vec<f64>,
}

impl GridSpec {
    pub fn symmetric() -> Self {
        GridSpec {
            taus: vec![0.5, 1.0],
            xs: vec![0.0, 0.0],
            hs: vec![0.0, 0.0],
        }
    }

    pub fn to_grid(&self) -> LabResult<Grid> {
        let g = if self.taus.last() == Some(&1.0) {
            Grid::new(self.taus.clone(), self.xs.clone(), self.hs.clone())
        } else {
            Grid::from_interior(&self.taus, &self.xs, &self.hs)
        };
        g.map_err(|e| LabError::core("grid", e))
    }

    /// The normalized full form, terminal point included.
    pub fn canonical(grid: &Grid) -> Self {
        GridSpec {
            taus: grid.taus().to_vec(),
            xs: grid.xs().to_vec(),
            hs: grid.hs().to_vec(),
        }
    }
}

/// Every key is optional; unset keys fall back to per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: Option<GridSource>,
    pub condition: Option<Condition>,
    #[serde(rename = "L")]
    pub l: Option<Vec<f64>>,
    pub nodes: Option<usize>,
    pub radius: Option<f64>,
    pub z_radius: Option<f64>,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub taus: Option<Vec<f64>>,
    pub count: Option<usize>,
    pub cov: Option<Vec<f64>>,
    pub timing: Option<bool>,
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    /// Reads a config file; relative grid paths are taken relative to the file.
    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            LabError::validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| LabError::validation(format!("config {}: {e}", path.display())))?;
        if let Some(GridSource::Path(p)) = &cfg.grid {
            if p.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.grid = Some(GridSource::Path(base.join(p)));
            }
        }
        Ok(cfg)
    }

    /// Keys set in `flags` replace those of `self`.
    pub fn overlay(self, flags: &Flags) -> Self {
        ExperimentConfig {
            grid: flags.grid.clone().map(GridSource::Path).or(self.grid),
            condition: flags.condition.or(self.condition),
            l: flags.l.clone().or(self.l),
            nodes: flags.nodes.or(self.nodes),
            radius: flags.radius.or(self.radius),
            z_radius: flags.z_radius.or(self.z_radius),
            mc_samples: flags.mc_samples.or(self.mc_samples),
            seed: flags.seed.or(self.seed),
            out: flags.out.clone().or(self.out),
            format: flags.format.or(self.format),
            taus: flags.taus.clone().or(self.taus),
            count: flags.count.or(self.count),
            cov: flags.cov.clone().or(self.cov),
            timing: if flags.timing {
                Some(true)
            } else {
                self.timing
            },
            threads: flags.threads.or(self.threads),
        }
    }

    pub fn from_flags(flags: &Flags) -> LabResult<Self> {
        let base = match &flags.config {
            Some(p) => Self::load(p)?,
            None => ExperimentConfig::default(),
        };
        Ok(base.overlay(flags))
    }
}

pub const DEFAULT_SEED: u64 = 20_240_601;

/// A config with defaults filled in and every module precondition checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct Resolved {
    pub command: &'static str,
    pub grid: GridSpec,
    pub condition: Condition,
    #[serde(rename = "L")]
    pub l: Vec<f64>,
    pub nodes: usize,
    pub radius: Option<f64>,
    pub z_radius: f64,
    pub mc_samples: usize,
    pub seed: u64,
    pub taus: Vec<f64>,
    pub count: usize,
    pub cov: Option<(f64, f64)>,
    pub timing: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Resolved {
    pub fn quad_spec(&self) -> QuadSpec64 {
        let s = QuadSpec64::default().with_nodes(self.nodes);
        match self.radius {
            Some(r) => s.with_radius(r),
            None => s,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid.to_grid().expect("validated at resolution")
    }
}

fn default_ls(cmd: Command) -> Vec<f64> {
    match cmd {
        Command::Tw => vec![-2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0],
        Command::Smalln => vec![10.0, 20.0],
        _ => vec![10.0, 100.0, 1000.0, 10000.0],
    }
}

fn default_nodes(cmd: Command) -> usize {
    match cmd {
        Command::Smalln => kpz_cond::kpz_core::smalln_default_spec().nodes_per_leg,
        _ => QuadSpec64::default().nodes_per_leg,
    }
}

fn read_grid(src: &Option<GridSource>) -> LabResult<GridSpec> {
    match src {
        None => Ok(GridSpec::symmetric()),
        Some(GridSource::Inline(g)) => Ok(g.clone()),
        Some(GridSource::Path(p)) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                LabError::validation(format!("cannot read grid {}: {e}", p.display()))
            })?;
            serde_json::from_str(&text)
                .map_err(|e| LabError::validation(format!("grid {}: {e}", p.display())))
        }
    }
}

/// Fills defaults for `cmd` and checks every precondition before anything is computed.
pub fn resolve(cmd: Command, cfg: &ExperimentConfig) -> LabResult<Resolved> {
    let grid_spec = read_grid(&cfg.grid)?;
    let grid = grid_spec.to_grid()?;
    let r = Resolved {
        command: cmd.name(),
        grid: GridSpec::canonical(&grid),
        condition: cfg.condition.unwrap_or(Condition::Step),
        l: cfg.l.clone().unwrap_or_else(|| default_ls(cmd)),
        nodes: cfg.nodes.unwrap_or_else(|| default_nodes(cmd)),
        radius: cfg.radius,
        z_radius: cfg.z_radius.unwrap_or(kpz_cond::kpz_core::DEFAULT_Z_RADIUS),
        mc_samples: cfg.mc_samples.unwrap_or(200_000),
        seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        taus: cfg.taus.clone().unwrap_or_else(|| vec![0.25, 0.5, 0.75]),
        count: cfg.count.unwrap_or(1000),
        cov: None,
        timing: cfg.timing.unwrap_or(false),
        out: cfg.out.clone(),
        format: cfg.format.unwrap_or_default(),
        threads: cfg.threads,
    };
    let cov = match &cfg.cov {
        None => None,
        Some(v) if v.len() == 2 => Some((v[0], v[1])),
        Some(v) => {
            return Err(LabError::validation(format!(
                "--cov takes two times s,t, got {v:?}"
            )))
        }
    };
    let r = Resolved { cov, ..r };
    validate(cmd, &r, &grid)?;
    Ok(r)
}

fn validate(cmd: Command, r: &Resolved, grid: &Grid) -> LabResult<()> {
    let bad = |m: String| Err(LabError::validation(m));
    if r.l.is_empty() || r.l.iter().any(|l| !l.is_finite()) {
        return bad(format!(
            "L list must be non-empty and finite, got {:?}",
            r.l
        ));
    }
    r.quad_spec()
        .validate()
        .map_err(|e| LabError::core("quadrature", e))?;
    match cmd {
        Command::Tw => {
            let lo = kpz_cond::tracy_widom::DEFAULT_X_MIN;
            let hi = kpz_cond::special::AIRY_WINDOW.1;
            // the flat columns evaluate GOE at 2^{2/3}·L
            let k = 2f64.powf(2.0 / 3.0);
            let (lo, hi) = (lo / k, hi / k);
            if let Some(l) = r.l.iter().find(|l| !(**l >= lo && **l <= hi)) {
                return bad(format!(
                    "L = {l} is outside the tabulated range [{lo:.4}, {hi:.4}]"
                ));
            }
        }
        Command::Limit => {
            if r.mc_samples == 0 {
                return bad("mc-samples must be positive".into());
            }
            grid.limit_query(r.condition)
                .map_err(|e| LabError::core("limit query", e))?;
        }
        Command::Converge => {
            if let Some(l) = r.l.iter().find(|l| **l <= 0.0) {
                return bad(format!("L = {l} must be positive"));
            }
            let max = kpz_cond::kpz_core::MAX_RATIO_POINTS;
            if grid.m() > max {
                return bad(format!(
                    "the ratio evaluator handles m ≤ {max}, grid has m = {}",
                    grid.m()
                ));
            }
        }
        Command::Smalln => {
            if let Some(l) = r.l.iter().find(|l| **l <= 0.0) {
                return bad(format!("L = {l} must be positive"));
            }
            if grid.m() != 2 {
                return bad(format!("smalln needs an m = 2 grid, got m = {}", grid.m()));
            }
            if !(r.z_radius > 1.0) || !r.z_radius.is_finite() {
                return bad(format!("z-radius must exceed 1, got {}", r.z_radius));
            }
        }
        Command::Sample => {
            if r.count == 0 {
                return bad("count must be positive".into());
            }
            if r.taus.is_empty()
                || r.taus.iter().any(|t| !(*t > 0.0 && *t < 1.0))
                || r.taus.windows(2).any(|w| w[1] <= w[0])
            {
                return bad(format!(
                    "taus must be strictly increasing inside (0, 1), got {:?}",
                    r.taus
                ));
            }
            if let Some((s, t)) = r.cov {
                if !(s < t) || !r.taus.contains(&s) || !r.taus.contains(&t) {
                    return bad(format!(
                        "--cov needs s < t, both among the taus; got {s},{t}"
                    ));
                }
            }
        }
    }
    if r.threads.is_some_and(|t| t > 4096) {
        return bad("threads must be at most 4096".into());
    }
    Ok(())
}
