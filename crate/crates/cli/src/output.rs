//! Deterministic text artifacts: CSV bodies and the meta record.
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! values down to the residual floor survive serialization exactly and
//! identical runs produce byte-identical files.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;

pub fn fmt_float(x: f64) -> String {
    format!("{x}")
}

/// Write a CSV file with LF line endings.
pub fn write_csv<P: AsRef<Path>>(
    path: P,
    header: &[String],
    rows: &[Vec<String>],
) -> io::Result<()> {
    let mut body = String::new();
    body.push_str(&header.join(","));
    body.push('\n');
    for row in rows {
        body.push_str(&row.join(","));
        body.push('\n');
    }
    fs::write(path, body)
}

#[derive(Debug, Serialize)]
pub struct IterationStats {
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

impl IterationStats {
    pub fn from_counts(counts: &[usize]) -> Option<Self> {
        if counts.is_empty() {
            return None;
        }
        let min = *counts.iter().min().unwrap();
        let max = *counts.iter().max().unwrap();
        let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
        Some(Self { min, max, mean })
    }
}

/// Everything needed to reproduce and interpret a run; written as
/// meta.toml next to the CSV files. Deliberately excludes wall-clock
/// information.
#[derive(Debug, Serialize)]
pub struct MetaRecord {
    pub command: String,
    pub n1: usize,
    pub dx: f64,
    pub steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<IterationStats>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub config: ExperimentConfig,
}

pub fn write_meta<P: AsRef<Path>>(path: P, meta: &MetaRecord) -> io::Result<()> {
    let text = toml::to_string_pretty(meta)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
    fs::write(path, text)
}
