use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// Seventeen significant digits in scientific notation: enough to round-trip
/// any `f64`, independent of locale.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Numeric columns of a CSV, in header order, checked against `expected`.
pub fn read_columns(path: &Path, expected: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("missing artifact {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != expected {
        bail!("{}: expected columns {:?}, found {:?}", path.display(), expected, header);
    }
    let mut cols = vec![Vec::new(); expected.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("{} row {}", path.display(), line + 2))?;
        for (j, field) in rec.iter().enumerate() {
            let x: f64 =
                field.parse().with_context(|| format!("{} row {} column {}", path.display(), line + 2, expected[j]))?;
            cols[j].push(x);
        }
    }
    Ok(cols)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    AllPass,
    Partial,
    Failed,
}

impl Outcome {
    /// 0 when every run passed, 2 when some did, 1 when none did.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::AllPass => 0,
            Outcome::Partial => 2,
            Outcome::Failed => 1,
        }
    }

    pub fn from_counts(passed: usize, total: usize) -> Self {
        if total > 0 && passed == total {
            Outcome::AllPass
        } else if passed > 0 {
            Outcome::Partial
        } else {
            Outcome::Failed
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest<T: Serialize> {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub scenario_hash: String,
    pub outcome: Outcome,
    pub wall_clock_seconds: f64,
    pub details: T,
}

impl<T: Serialize> Manifest<T> {
    pub fn new(command: &'static str, scenario_hash: String, outcome: Outcome, seconds: f64, details: T) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            scenario_hash,
            outcome,
            wall_clock_seconds: seconds,
            details,
        }
    }
}
