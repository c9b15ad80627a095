//! CSV and sidecar output.
//!
//! CSV bytes are a pure function of the resolved configuration and seed:
//! floats print as fixed-precision scientific notation, rows arrive in
//! deterministic order, and the only timestamp lives in the JSON sidecar.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;

/// One CSV cell. Missing values print as empty cells.
#[derive(Debug, Clone)]
pub enum Cell {
    Float(f64),

    Bool(bool),
    Text(String),
    Missing,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Self {
        match v {
            Some(x) => Cell::Float(x),
            None => Cell::Missing,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),

            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => {
                if s.contains(',') || s.contains('"') || s.contains('\n') {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
            Cell::Missing => String::new(),
        }
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else {
        format!("{v:.12e}")
    }
}

/// Write a CSV table; headers fixed by the caller.
pub fn write_csv(path: &Path, headers: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&headers.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), headers.len());
        let rendered: Vec<String> = row.iter().map(Cell::render).collect();
        text.push_str(&rendered.join(","));
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Serialize)]
pub struct Sidecar<'a> {
    pub tool: &'a str,
    pub version: &'a str,
    pub command: &'a str,
    pub preset: Option<&'a str>,
    pub overrides: &'a [String],
    pub seed: u64,
    pub generated_at_unix_s: u64,
    /// Fully resolved configuration the run used.
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
}

/// Write `<stem>.meta.json` next to the data file(s).
pub fn write_sidecar(dir: &Path, stem: &str, sidecar: &Sidecar) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.meta.json"));
    let text = serde_json::to_string_pretty(sidecar)?;
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
