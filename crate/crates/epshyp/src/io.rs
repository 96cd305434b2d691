//! `report.json`, `checks.csv` and orbit traces.

use std::fs;
use std::path::{Path, PathBuf};

use epshyp_core::shift::OrbitRow;
use epshyp_core::verify::Report;
use serde::Serialize;

use crate::CliError;

#[derive(Serialize)]
struct CheckRow<'a> {
    suite: &'a str,
    check: &'a str,
    at: &'a str,
    lhs: f64,
    rhs: f64,
    tolerance: f64,
    pass: bool,
    asserted: bool,
}

pub fn write_report(dir: &Path, report: &Report) -> Result<(PathBuf, PathBuf), CliError> {
    fs::create_dir_all(dir)?;
    let json = dir.join("report.json");
    fs::write(&json, serde_json::to_string_pretty(report)?)?;
    let csv_path = dir.join("checks.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    for r in report.records() {
        w.serialize(CheckRow {
            suite: &r.suite,
            check: &r.check,
            at: &r.at,
            lhs: r.lhs,
            rhs: r.rhs,
            tolerance: r.tolerance,
            pass: r.pass,
            asserted: r.asserted,
        })?;
    }
    w.flush()?;
    Ok((json, csv_path))
}

pub fn read_report(path: &Path) -> Result<Report, CliError> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Columns `n, distance, relative`.
pub fn write_orbit(path: &Path, rows: &[OrbitRow]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "distance", "relative"])?;
    for r in rows {
        w.write_record([r.n.to_string(), r.distance.to_string(), r.relative.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
