use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use monogenic::quadrature::NormTable;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};

pub const SCHEMA: u32 = 1;

/// Result of one command before it is written out.
pub struct Outcome {
    pub passed: bool,
    pub norm_table_sha256: String,
    pub result: Value,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
}

pub fn checksum(nt: &NormTable) -> String {
    format!("{:x}", Sha256::digest(nt.to_json().as_bytes()))
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: u32,
    command: &'a str,
    passed: bool,
    config: &'a RunConfig,
    norm_table_sha256: &'a str,
    result: &'a Value,
    /// Seconds since the Unix epoch; not covered by the determinism contract.
    timestamp: u64,
}

pub fn to_json(config: &RunConfig, outcome: &Outcome) -> String {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let env = Envelope {
        schema: SCHEMA,
        command: &config.command,
        passed: outcome.passed,
        config,
        norm_table_sha256: &outcome.norm_table_sha256,
        result: &outcome.result,
        timestamp,
    };
    let mut text = serde_json::to_string_pretty(&env).expect("report serializes");
    text.push('\n');
    text
}

pub fn to_csv(outcome: &Outcome) -> std::io::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&outcome.csv_header)?;
    for row in &outcome.csv_rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

/// Writes the report. CSV output to a file gets a `<out>.meta.json` sidecar
/// holding the full JSON report.
pub fn emit(config: &RunConfig, outcome: &Outcome, out: Option<&Path>) -> std::io::Result<()> {
    let body = match config.format {
        Format::Json => to_json(config, outcome),
        Format::Csv => to_csv(outcome)?,
    };
    match out {
        Some(path) => {
            std::fs::write(path, body)?;
            if config.format == Format::Csv {
                let mut meta = path.as_os_str().to_owned();
                meta.push(".meta.json");
                std::fs::write(meta, to_json(config, outcome))?;
            }
        }
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

pub fn num(x: f64) -> String {
    x.to_string()
}
