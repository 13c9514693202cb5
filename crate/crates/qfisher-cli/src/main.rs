//! `qfisher` command line: QFI point values, beta sweeps (unitary and
//! noisy), scaling curves and precision bounds, emitted as CSV or JSON.
//!
//! Exit codes: 0 success, 1 numerical/domain failure, 2 usage error.

mod config;
mod output;

use clap::{Parser, Subcommand};

use qfisher::family::unitary_at;
use qfisher::feedback;
use qfisher::noisy;
use qfisher::qfi;

use config::{CommandKind, CommonArgs, RunConfig};
use output::Report;

#[derive(Parser)]
#[command(
    name = "qfisher",
    version,
    about = "Quantum Fisher information for Hamiltonian parameter estimation with feedback controls"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Max QFI of the family's unitary channel at one parameter point
    Qfi(CommonArgs),
    /// Controlled vs uncontrolled QFI across a beta grid (unitary case)
    Sweep(CommonArgs),
    /// Probe-optimized noisy sweep with per-segment dephasing
    NoisySweep(CommonArgs),
    /// Controlled QFI at beta = 0 for a list of segment counts
    Scaling(CommonArgs),
    /// Cramer-Rao precision bound 1/sqrt(n J)
    Bound(CommonArgs),
}

fn main() {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Qfi(a) => (CommandKind::Qfi, a),
        Command::Sweep(a) => (CommandKind::Sweep, a),
        Command::NoisySweep(a) => (CommandKind::NoisySweep, a),
        Command::Scaling(a) => (CommandKind::Scaling, a),
        Command::Bound(a) => (CommandKind::Bound, a),
    };
    let cfg = match config::resolve(kind, args) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    };
    match run(&cfg) {
        Ok(()) => {}
        Err(RunError::Domain(e)) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
        Err(RunError::Io(e)) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

enum RunError {
    Domain(qfisher::Error),
    Io(std::io::Error),
}

impl From<qfisher::Error> for RunError {
    fn from(e: qfisher::Error) -> Self {
        Self::Domain(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

fn run(cfg: &RunConfig) -> Result<(), RunError> {
    let family = cfg.family.build()?;
    let report = match cfg.command {
        CommandKind::Qfi => {
            let r = qfi::channel_qfi_fd(|y| unitary_at(&family, y, cfg.t_total), cfg.x, cfg.dx)?;
            Report::Qfi(r)
        }
        CommandKind::Bound => {
            let r = qfi::channel_qfi_fd(|y| unitary_at(&family, y, cfg.t_total), cfg.x, cfg.dx)?;
            let bound = qfi::precision_bound(r.value, cfg.n)?;
            Report::Bound {
                qfi: r.value,
                n: cfg.n,
                bound,
            }
        }
        CommandKind::Sweep => {
            let sweep = feedback::beta_sweep(
                &family,
                cfg.x,
                cfg.m,
                cfg.t_total,
                &cfg.beta_grid(),
                cfg.dx,
            )?;
            Report::Sweep(sweep)
        }
        CommandKind::NoisySweep => {
            let sweep_cfg = noisy::NoisySweepConfig {
                eta: cfg.eta,
                m: cfg.m,
                t_total: cfg.t_total,
                x_true: cfg.x,
                beta_grid: cfg.beta_grid(),
                dx: cfg.dx,
                probe_search: noisy::ProbeSearch {
                    grid_points_per_angle: cfg.probe_grid,
                    refine_iters: cfg.probe_refine,
                },
            };
            Report::Sweep(noisy::noisy_beta_sweep(&sweep_cfg, &family)?)
        }
        CommandKind::Scaling => {
            let points =
                feedback::scaling_curve(&family, cfg.x, cfg.t_total, &cfg.m_values, cfg.dx)?;
            let limit = qfisher::family::universal_qfi(&family, cfg.x, cfg.t_total)?;
            Report::Scaling { points, limit }
        }
    };

    match &cfg.out {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            output::write_report(cfg, &report, &mut file)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            output::write_report(cfg, &report, &mut lock)?;
        }
    }
    Ok(())
}
