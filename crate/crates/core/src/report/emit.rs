//! Report serialization.
//!
//! JSON goes through `serde_json::Value`, whose maps are sorted, and is then
//! written by hand so that floats always carry 17 significant digits and each
//! check sits on its own line. CSV and text are flat tables over the checks.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use serde_json::Value;

use super::{ConvergenceReport, ResidualReport};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" | "txt" => Ok(Format::Text),
            other => Err(Error::Config(format!("unknown output format `{other}` (json, csv, text)"))),
        }
    }
}

pub(crate) fn non_finite_label(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// 17 significant digits, enough to round-trip any f64.
fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        non_finite_label(v)
    }
}

fn json_scalar(out: &mut String, v: &Value) {
    match v {
        Value::Number(n) if n.is_f64() => out.push_str(&float(n.as_f64().unwrap_or(f64::NAN))),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                json_scalar(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                json_scalar(out, item);
            }
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

fn render_json(report: &impl serde::Serialize) -> Result<String> {
    let value = serde_json::to_value(report).map_err(|e| Error::Config(e.to_string()))?;
    let Value::Object(map) = value else { unreachable!("reports serialize to objects") };
    let mut out = String::from("{\n");
    let last = map.len().saturating_sub(1);
    for (i, (key, v)) in map.iter().enumerate() {
        let _ = write!(out, "  {}: ", Value::String(key.clone()));
        match (key.as_str(), v) {
            ("checks" | "rows", Value::Array(rows)) if !rows.is_empty() => {
                out.push_str("[\n");
                for (j, row) in rows.iter().enumerate() {
                    out.push_str("    ");
                    json_scalar(&mut out, row);
                    out.push_str(if j + 1 < rows.len() { ",\n" } else { "\n" });
                }
                out.push_str("  ]");
            }
            _ => json_scalar(&mut out, v),
        }
        out.push_str(if i < last { ",\n" } else { "\n" });
    }
    out.push_str("}\n");
    Ok(out)
}

fn render_csv(report: &ResidualReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config(e.to_string());
    w.write_record(["id", "applicable", "samples", "max_residual", "mean_residual", "tolerance", "pass"])
        .map_err(io)?;
    for c in &report.checks {
        w.write_record([
            c.id.clone(),
            c.applicable.to_string(),
            c.samples.to_string(),
            float(c.max_residual),
            float(c.mean_residual),
            float(c.tolerance),
            c.pass.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn render_text(report: &ResidualReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "target     {}", report.target);
    let _ = writeln!(out, "structure  {}", report.structure);
    let _ = writeln!(
        out,
        "sample     {} points, seed {}, step {:e}, order {}{}",
        report.points,
        report.seed,
        report.step,
        report.order,
        report.perturb.map(|e| format!(", perturbed eps = {e:e}")).unwrap_or_default()
    );
    out.push('\n');
    let width = report.checks.iter().map(|c| c.id.len()).max().unwrap_or(2).max(2);
    let _ = writeln!(out, "{:<width$}  {:>7}  {:>10}  {:>10}  {:>8}  result", "id", "samples", "max", "mean", "tol");
    for c in &report.checks {
        let verdict = match (c.applicable, c.pass) {
            (false, _) => "n/a",
            (true, true) => "pass",
            (true, false) => "FAIL",
        };
        let _ = writeln!(
            out,
            "{:<width$}  {:>7}  {:>10.3e}  {:>10.3e}  {:>8.0e}  {verdict}",
            c.id, c.samples, c.max_residual, c.mean_residual, c.tolerance
        );
    }
    let s = &report.summary;
    out.push('\n');
    if let Some(f) = &s.flags {
        let _ = writeln!(
            out,
            "contact metric {}, K-contact {}, H-contact {}, Ric(xi) ∥ xi {}",
            f.contact_metric, f.k_contact, f.h_contact, f.xi_ricci_eigenvector
        );
    }
    let _ = writeln!(out, "first equation residual   {:.3e}", s.first_eq_residual);
    let _ = writeln!(out, "second equation residual  {:.3e}", s.second_eq_residual);
    let _ = writeln!(out, "harmonic                  {}", s.harmonic);
    let _ = writeln!(out, "all checks pass           {}", s.all_pass);
    if let Some(ms) = s.runtime_ms {
        let _ = writeln!(out, "runtime                   {ms:.1} ms");
    }
    out
}

pub fn render_report(report: &ResidualReport, format: Format) -> Result<String> {
    match format {
        Format::Json => render_json(report),
        Format::Csv => render_csv(report),
        Format::Text => Ok(render_text(report)),
    }
}

pub fn emit_report(report: &ResidualReport, format: Format, sink: &mut dyn Write) -> Result<()> {
    sink.write_all(render_report(report, format)?.as_bytes())?;
    sink.flush()?;
    Ok(())
}

fn convergence_csv(c: &ConvergenceReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Config(e.to_string());
    w.write_record(["step", "max_residual", "ratio", "observed_order"]).map_err(io)?;
    for (i, r) in c.rows.iter().enumerate() {
        let (ratio, order) = if i == 0 {
            (String::new(), String::new())
        } else {
            (float(c.ratios[i - 1]), float(c.observed_orders[i - 1]))
        };
        w.write_record([float(r.step), float(r.max_residual), ratio, order]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn convergence_text(c: &ConvergenceReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "target {}, check {}, order {}\n", c.target, c.check, c.order);
    let _ = writeln!(out, "{:>10}  {:>12}  {:>8}  {:>8}", "step", "max", "ratio", "p_obs");
    for (i, r) in c.rows.iter().enumerate() {
        let tail = if i == 0 {
            format!("{:>8}  {:>8}", "-", "-")
        } else {
            format!("{:>8.4}  {:>8.4}", c.ratios[i - 1], c.observed_orders[i - 1])
        };
        let _ = writeln!(out, "{:>10.3e}  {:>12.4e}  {tail}", r.step, r.max_residual);
    }
    let _ = writeln!(out, "\nwithin ±{:.1}% of the ideal ratio: {}", ConvergenceReport::BAND * 100.0, c.within_band());
    out
}

pub fn render_convergence(c: &ConvergenceReport, format: Format) -> Result<String> {
    match format {
        Format::Json => render_json(c),
        Format::Csv => convergence_csv(c),
        Format::Text => Ok(convergence_text(c)),
    }
}

pub fn emit_convergence(c: &ConvergenceReport, format: Format, sink: &mut dyn Write) -> Result<()> {
    sink.write_all(render_convergence(c, format)?.as_bytes())?;
    sink.flush()?;
    Ok(())
}

pub fn parse_report_json(text: &str) -> Result<ResidualReport> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed report: {e}")))
}
