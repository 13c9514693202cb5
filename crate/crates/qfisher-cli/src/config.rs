//! Run configuration: defaults mirror the library's reference experiment
//! (B = 1, T = 1, m = 5, x = 1, dx = 1e-5, eta = 0.8^(1/5)), a JSON config
//! file can override them, and explicit flags override the file.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use qfisher::family::FamilySpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Qfi,
    Sweep,
    NoisySweep,
    Scaling,
    Bound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fully resolved run configuration; the JSON form of this record is the
/// config-file schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub family: FamilySpec,
    pub x: f64,
    pub t_total: f64,
    pub m: usize,
    pub dx: f64,
    pub n: u64,
    pub eta: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_steps: usize,
    pub m_values: Vec<usize>,
    pub probe_grid: usize,
    pub probe_refine: usize,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

/// Shared command-line flags; each one overrides the config-file value.
#[derive(Args, Clone, Debug)]
pub struct CommonArgs {
    /// JSON config file mirroring the RunConfig record
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Built-in family selector (matrix-valued families need a config file)
    #[arg(long, value_parser = ["direction-field"])]
    pub family: Option<String>,

    /// Direction-field strength B
    #[arg(long = "B")]
    pub b: Option<f64>,

    /// Total evolution time T
    #[arg(long = "T")]
    pub t_total: Option<f64>,

    /// True parameter value x
    #[arg(long)]
    pub x: Option<f64>,

    /// Number of control segments m
    #[arg(long)]
    pub m: Option<usize>,

    /// Central-difference step
    #[arg(long)]
    pub dx: Option<f64>,

    /// Repetition count for the precision bound
    #[arg(long)]
    pub n: Option<u64>,

    /// Per-segment dephasing parameter in [0, 1]
    #[arg(long)]
    pub eta: Option<f64>,

    #[arg(long = "beta-min")]
    pub beta_min: Option<f64>,

    #[arg(long = "beta-max")]
    pub beta_max: Option<f64>,

    /// Number of beta grid points (>= 2)
    #[arg(long = "beta-steps")]
    pub beta_steps: Option<usize>,

    /// Segment counts for the scaling curve, comma separated
    #[arg(long = "m-values", value_delimiter = ',')]
    pub m_values: Option<Vec<usize>>,

    /// Probe-search azimuth grid points (polar uses half as many)
    #[arg(long = "probe-grid")]
    pub probe_grid: Option<usize>,

    /// Probe-search refinement rounds (step halving)
    #[arg(long = "probe-refine")]
    pub probe_refine: Option<usize>,

    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,

    /// Output path (standard output when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

const FIG3_ETA: f64 = 0.956352499790037; // 0.8^(1/5)

fn defaults(command: CommandKind) -> RunConfig {
    RunConfig {
        command,
        family: FamilySpec::DirectionField { b: 1.0 },
        x: 1.0,
        t_total: 1.0,
        m: 5,
        dx: 1e-5,
        n: 1,
        eta: FIG3_ETA,
        beta_min: -3.0,
        beta_max: 3.0,
        beta_steps: 601,
        m_values: vec![1, 2, 5, 10, 20, 50, 100, 200],
        probe_grid: 64,
        probe_refine: 6,
        format: OutputFormat::Csv,
        out: None,
    }
}

/// Merge defaults, config file and flags (in increasing precedence) and
/// validate ranges. Errors are usage errors (exit code 2).
pub fn resolve(command: CommandKind, args: &CommonArgs) -> Result<RunConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("--config {}: {e}", path.display()))?;
            let mut from_file: RunConfig = serde_json::from_str(&text)
                .map_err(|e| format!("--config {}: {e}", path.display()))?;
            from_file.command = command;
            from_file
        }
        None => defaults(command),
    };

    if let Some(name) = &args.family {
        // the only flag-selectable family; matrix payloads come from the file
        debug_assert_eq!(name, "direction-field");
        let b = match cfg.family {
            FamilySpec::DirectionField { b } => b,
            _ => 1.0,
        };
        cfg.family = FamilySpec::DirectionField { b };
    }
    if let Some(b) = args.b {
        match &mut cfg.family {
            FamilySpec::DirectionField { b: slot } => *slot = b,
            _ => return Err("--B applies only to the direction-field family".into()),
        }
    }
    if let Some(v) = args.t_total {
        cfg.t_total = v;
    }
    if let Some(v) = args.x {
        cfg.x = v;
    }
    if let Some(v) = args.m {
        cfg.m = v;
    }
    if let Some(v) = args.dx {
        cfg.dx = v;
    }
    if let Some(v) = args.n {
        cfg.n = v;
    }
    if let Some(v) = args.eta {
        cfg.eta = v;
    }
    if let Some(v) = args.beta_min {
        cfg.beta_min = v;
    }
    if let Some(v) = args.beta_max {
        cfg.beta_max = v;
    }
    if let Some(v) = args.beta_steps {
        cfg.beta_steps = v;
    }
    if let Some(v) = &args.m_values {
        cfg.m_values = v.clone();
    }
    if let Some(v) = args.probe_grid {
        cfg.probe_grid = v;
    }
    if let Some(v) = args.probe_refine {
        cfg.probe_refine = v;
    }
    if let Some(v) = args.format {
        cfg.format = v;
    }
    if let Some(v) = &args.out {
        cfg.out = Some(v.clone());
    }

    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), String> {
    if !(cfg.t_total > 0.0) || !cfg.t_total.is_finite() {
        return Err(format!("--T must be positive, got {}", cfg.t_total));
    }
    if !cfg.x.is_finite() {
        return Err(format!("--x must be finite, got {}", cfg.x));
    }
    if cfg.m < 1 {
        return Err("--m must be >= 1".into());
    }
    if !(cfg.dx > 0.0) || !cfg.dx.is_finite() {
        return Err(format!("--dx must be positive, got {}", cfg.dx));
    }
    if cfg.n < 1 {
        return Err("--n must be >= 1".into());
    }
    if !(0.0..=1.0).contains(&cfg.eta) {
        return Err(format!("--eta must lie in [0, 1], got {}", cfg.eta));
    }
    if cfg.beta_steps < 2 {
        return Err("--beta-steps must be >= 2".into());
    }
    if !(cfg.beta_min < cfg.beta_max) {
        return Err(format!(
            "--beta-min must be below --beta-max, got [{}, {}]",
            cfg.beta_min, cfg.beta_max
        ));
    }
    if cfg.m_values.is_empty() || cfg.m_values.iter().any(|&m| m == 0) {
        return Err("--m-values entries must be >= 1".into());
    }
    if cfg.probe_grid < 2 {
        return Err("--probe-grid must be >= 2".into());
    }
    if let FamilySpec::DirectionField { b } = cfg.family {
        if !(b > 0.0) || !b.is_finite() {
            return Err(format!("--B must be positive, got {b}"));
        }
    }
    // surface non-Hermitian payloads (named by coefficient) at parse time
    cfg.family.build().map_err(|e| e.to_string())?;
    Ok(())
}

impl RunConfig {
    pub fn beta_grid(&self) -> Vec<f64> {
        let n = self.beta_steps;
        (0..n)
            .map(|i| {
                self.beta_min + (self.beta_max - self.beta_min) * i as f64 / (n - 1) as f64
            })
            .collect()
    }
}
