//! `results.csv` and `manifest.json`.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::runner::{ReportSummary, Row, RunOutcome};

pub const CSV_HEADER: [&str; 12] = [
    "kind", "observable", "lambda", "t", "M", "two_j", "re_finite", "im_finite", "re_limit", "im_limit", "abs_error",
    "status",
];

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn int(v: Option<u32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.into()))?;
    w.write_record(CSV_HEADER).map_err(|e| CliError::Io(e.into()))?;
    for r in rows {
        w.write_record([
            r.kind.to_string(),
            r.observable.clone(),
            num(r.lambda),
            num(r.t),
            int(r.m),
            int(r.two_j),
            num(r.finite.map(|z| z.re)),
            num(r.finite.map(|z| z.im)),
            num(r.limit.map(|z| z.re)),
            num(r.limit.map(|z| z.im)),
            num(r.abs_error),
            r.status.clone(),
        ])
        .map_err(|e| CliError::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

/// Hex SHA-256 of the compact JSON serialization of the config echo.
pub fn config_hash(echo: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(echo).expect("json values serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub pass: bool,
    pub reports: usize,
    pub failed: usize,
    pub exit_code: i32,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub config: &'a serde_json::Value,
    pub config_sha256: String,
    pub version: &'static str,
    pub wall_time_seconds: f64,
    pub threads: usize,
    pub seed: u64,
    pub row_status: Vec<&'a str>,
    pub reports: &'a [ReportSummary],
    pub summary: Summary,
    pub errors: Vec<String>,
}

pub fn write_manifest(path: &Path, manifest: &Manifest<'_>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn build_manifest<'a>(
    echo: &'a serde_json::Value,
    outcome: &'a RunOutcome,
    wall: f64,
    threads: usize,
    seed: u64,
) -> Manifest<'a> {
    let failed = outcome.reports.iter().filter(|r| !r.pass).count();
    Manifest {
        config: echo,
        config_sha256: config_hash(echo),
        version: env!("CARGO_PKG_VERSION"),
        wall_time_seconds: wall,
        threads,
        seed,
        row_status: outcome.rows.iter().map(|r| r.status.as_str()).collect(),
        reports: &outcome.reports,
        summary: Summary {
            pass: failed == 0,
            reports: outcome.reports.len(),
            failed,
            exit_code: outcome.exit_code(),
        },
        errors: outcome.error_codes(),
    }
}

/// Creates `dir`, or checks that it is empty unless `force` is set.
pub fn prepare_output_dir(dir: &Path, force: bool) -> Result<(), CliError> {
    if dir.exists() {
        if !dir.is_dir() {
            return Err(CliError::Config(format!("{} exists and is not a directory", dir.display())));
        }
        let non_empty = fs::read_dir(dir)?.next().is_some();
        if non_empty && !force {
            return Err(CliError::Config(format!(
                "output directory {} is not empty (use --force to overwrite)",
                dir.display()
            )));
        }
    } else {
        fs::create_dir_all(dir)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable() {
        let v: serde_json::Value = serde_json::from_str(r#"{"b":1,"a":[1,2]}"#).unwrap();
        assert_eq!(config_hash(&v), config_hash(&v.clone()));
        assert_eq!(config_hash(&v).len(), 64);
    }

    #[test]
    fn number_formatting() {
        assert_eq!(num(None), "");
        assert_eq!(num(Some(0.125)), "0.125");
        assert_eq!(num(Some(f64::INFINITY)), "inf");
    }
}
