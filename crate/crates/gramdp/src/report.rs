//! Sweep report serialization.
//!
//! CSV has one row per ε under the header
//! `epsilon,mean_dp,mean_scaled_error,mse,rmspe_percent,iterations`, with
//! numbers printed to 12 significant digits. Metrics that are undefined
//! (true value zero) are left empty. JSON carries the full report.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use gramdp_core::bench::SweepReport;

use crate::error::Result;

pub const CSV_HEADER: &str = "epsilon,mean_dp,mean_scaled_error,mse,rmspe_percent,iterations";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Csv,
    Json,
}

/// Formats `x` with at most `digits` significant digits, like C's `%.*g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    // Round first so the exponent reflects the printed mantissa.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_fraction(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_owned()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g12(x: f64) -> String {
    format_significant(x, 12)
}

pub fn write_report_csv<W: Write>(r: &SweepReport, mut w: W) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for rec in &r.records {
        let (scaled, mse, rmspe) = match &rec.metrics {
            Some(m) => (g12(m.mean_scaled_error), g12(m.mse), g12(m.rmspe_percent)),
            None => Default::default(),
        };
        writeln!(
            w,
            "{},{},{},{},{},{}",
            g12(rec.epsilon),
            g12(rec.mean_dp_value),
            scaled,
            mse,
            rmspe,
            rec.iterations
        )?;
    }
    Ok(())
}

pub fn report_to_json(r: &SweepReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(r)?)
}

pub fn report_from_json(s: &str) -> Result<SweepReport> {
    Ok(serde_json::from_str(s)?)
}

pub fn emit_report(r: &SweepReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    match format {
        ReportFormat::Csv => write_report_csv(r, &mut w)?,
        ReportFormat::Json => {
            w.write_all(report_to_json(r)?.as_bytes())?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()?;
    Ok(())
}
