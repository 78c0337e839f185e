//! Report serialization: JSON, CSV and a plain text table.

use std::io::Write;
use std::str::FromStr;

use dronesim::blueteam::ActionKind;

use crate::{EvaluationReport, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    #[default]
    Csv,
    Table,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "table" | "text" => Ok(OutputFormat::Table),
            _ => Err(format!("unknown format `{s}` (json, csv, table)")),
        }
    }
}

/// CSV: a header then one row per episode. Columns are fixed.
pub fn emit_report<W: Write>(report: &EvaluationReport, format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Json => write_json(report, out),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["episode", "seed", "score", "steps", "compromised", "fingerprint"])?;
            for r in &report.records {
                w.write_record([
                    r.episode.to_string(),
                    r.seed.to_string(),
                    r.score.to_string(),
                    r.steps.to_string(),
                    r.compromised.to_string(),
                    report.fingerprint.clone(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
        OutputFormat::Table => {
            let mut out = out;
            writeln!(out, "team         {}", report.label)?;
            writeln!(out, "episodes     {}", report.episodes)?;
            writeln!(out, "mean         {:.1}", report.mean)?;
            writeln!(out, "std          {:.1}", report.std_dev)?;
            let compromised = report.records.iter().filter(|r| r.compromised).count();
            writeln!(out, "compromised  {compromised}")?;
            writeln!(out, "fingerprint  {}", report.fingerprint)?;
            Ok(())
        }
    }
}

/// Action counts of the sampled agents, one row per action kind.
pub fn emit_histogram<W: Write>(report: &EvaluationReport, format: OutputFormat, out: W) -> Result<()> {
    let total = report.sampled_actions().max(1) as f64;
    let rows: Vec<(ActionKind, u64)> = ActionKind::ALL
        .iter()
        .map(|&k| (k, report.histogram.get(&k).copied().unwrap_or(0)))
        .collect();
    match format {
        OutputFormat::Json => write_json(&report.histogram, out),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["action", "count", "fraction", "fingerprint"])?;
            for (k, n) in rows {
                w.write_record([
                    k.name().to_string(),
                    n.to_string(),
                    (n as f64 / total).to_string(),
                    report.fingerprint.clone(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
        OutputFormat::Table => {
            let mut out = out;
            for (k, n) in rows {
                writeln!(out, "{:<20} {:>8} {:>7.2}%", k.name(), n, 100.0 * n as f64 / total)?;
            }
            Ok(())
        }
    }
}

/// Sweep summary: one row per substitution count.
pub fn emit_sweep<W: Write>(reports: &[(usize, EvaluationReport)], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Json => write_json(&reports, out),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["k", "team", "episodes", "mean", "std", "fingerprint"])?;
            for (k, r) in reports {
                w.write_record([
                    k.to_string(),
                    r.label.clone(),
                    r.episodes.to_string(),
                    r.mean.to_string(),
                    r.std_dev.to_string(),
                    r.fingerprint.clone(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
        OutputFormat::Table => {
            let mut out = out;
            writeln!(out, "{:>3}  {:>9}  {:>8}  team", "k", "mean", "std")?;
            for (k, r) in reports {
                writeln!(out, "{k:>3}  {:>9.1}  {:>8.1}  {}", r.mean, r.std_dev, r.label)?;
            }
            Ok(())
        }
    }
}

fn write_json<W: Write, T: serde::Serialize + ?Sized>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}
