//! CSV and JSON emission. CSV uses 12 significant digits, plain ASCII,
//! header row first; JSON embeds the resolved config so a run can be
//! reproduced from its own output.

use std::io::Write;

use serde::Serialize;
use serde_json::json;

use qfisher::feedback::SweepResult;
use qfisher::qfi::QfiResult;

use crate::config::{OutputFormat, RunConfig};

/// 12 significant digits, exponent form.
fn sig(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.11e}")
}

fn method_name(r: &QfiResult) -> &'static str {
    match r.method {
        qfisher::qfi::QfiMethod::CteFd => "cte_fd",
        qfisher::qfi::QfiMethod::Generator => "generator",
        qfisher::qfi::QfiMethod::PureFd => "pure_fd",
        qfisher::qfi::QfiMethod::Sld => "sld",
        qfisher::qfi::QfiMethod::BuresFd => "bures_fd",
    }
}

pub enum Report {
    Qfi(QfiResult),
    Bound { qfi: f64, n: u64, bound: f64 },
    Sweep(SweepResult),
    Scaling { points: Vec<(usize, f64)>, limit: f64 },
}

pub fn write_report(cfg: &RunConfig, report: &Report, w: &mut dyn Write) -> std::io::Result<()> {
    match cfg.format {
        OutputFormat::Csv => write_csv(report, w),
        OutputFormat::Json => write_json(cfg, report, w),
    }
}

fn write_csv(report: &Report, w: &mut dyn Write) -> std::io::Result<()> {
    match report {
        Report::Qfi(r) => {
            writeln!(w, "value,method,dx")?;
            writeln!(
                w,
                "{},{},{}",
                sig(r.value),
                method_name(r),
                r.dx_used.map_or_else(|| "".into(), sig)
            )
        }
        Report::Bound { qfi, n, bound } => {
            writeln!(w, "qfi,n,bound")?;
            writeln!(w, "{},{n},{}", sig(*qfi), sig(*bound))
        }
        Report::Sweep(s) => {
            writeln!(w, "beta,qfi_controlled,qfi_uncontrolled,gain")?;
            for (beta, qc) in s.betas.iter().zip(&s.qfi_controlled) {
                writeln!(
                    w,
                    "{},{},{},{}",
                    sig(*beta),
                    sig(*qc),
                    sig(s.qfi_uncontrolled),
                    sig(qc - s.qfi_uncontrolled)
                )?;
            }
            Ok(())
        }
        Report::Scaling { points, limit } => {
            writeln!(w, "m,qfi,limit")?;
            for (m, qfi) in points {
                writeln!(w, "{m},{},{}", sig(*qfi), sig(*limit))?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct JsonEnvelope<'a, T: Serialize> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

fn to_writer<T: Serialize>(cfg: &RunConfig, body: T, w: &mut dyn Write) -> std::io::Result<()> {
    let envelope = JsonEnvelope { config: cfg, body };
    serde_json::to_writer_pretty(&mut *w, &envelope)?;
    writeln!(w)
}

fn write_json(cfg: &RunConfig, report: &Report, w: &mut dyn Write) -> std::io::Result<()> {
    match report {
        Report::Qfi(r) => to_writer(
            cfg,
            json!({"value": r.value, "method": method_name(r), "dx": r.dx_used}),
            w,
        ),
        Report::Bound { qfi, n, bound } => to_writer(
            cfg,
            json!({
                "qfi": qfi,
                "n": n,
                // infinity is not a JSON number; emit null (see README)
                "bound": if bound.is_finite() { Some(*bound) } else { None },
            }),
            w,
        ),
        Report::Sweep(s) => to_writer(cfg, json!({ "result": s }), w),
        Report::Scaling { points, limit } => {
            to_writer(cfg, json!({"points": points, "limit": limit}), w)
        }
    }
}
