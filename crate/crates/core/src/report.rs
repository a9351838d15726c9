//! Report envelopes: config echo, results, and a provenance block that is the
//! only place holding run-dependent data.

use serde::{Deserialize, Serialize};
use std::fmt::Write;
use std::time::{SystemTime, UNIX_EPOCH};

pub const PROVENANCE_KEY: &str = "provenance";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub code_version: String,
    pub seed: u64,
    /// Seconds since the Unix epoch.
    pub generated_at: u64,
}

impl Provenance {
    pub fn now(seed: u64) -> Self {
        Self {
            code_version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
            seed,
            generated_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report<R> {
    pub command: String,
    pub config: serde_json::Value,
    pub results: R,
    pub provenance: Provenance,
}

impl<R: Serialize> Report<R> {
    pub fn new(command: &str, config: serde_json::Value, results: R, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            config,
            results,
            provenance: Provenance::now(seed),
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// The report with its provenance block removed, for run-to-run comparison.
pub fn without_provenance(json: &str) -> serde_json::Result<serde_json::Value> {
    let mut v: serde_json::Value = serde_json::from_str(json)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove(PROVENANCE_KEY);
    }
    Ok(v)
}

/// Comma-separated table; floats use the shortest round-tripping form.
pub fn csv<I, Row>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = Row>,
    Row: IntoIterator<Item = String>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn intervals_csv(intervals: &[(f64, f64)]) -> String {
    csv(
        &["tau_lo", "tau_hi", "length"],
        intervals
            .iter()
            .map(|&(a, b)| [a.to_string(), b.to_string(), (b - a).to_string()]),
    )
}
