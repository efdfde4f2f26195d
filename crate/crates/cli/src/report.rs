//! Output artifacts. Every file is written to a sibling temporary and renamed
//! into place so readers never see a partial write.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sounderlab_core::sounder::Pdp;

use crate::error::CliError;

pub const PDP_HEADER: &str = "time_s,power_linear,power_db";

/// Levels below this are written as this value rather than `-inf`.
const FLOOR_DB: f64 = -300.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub config_echo: BTreeMap<String, String>,
    pub results: Vec<Value>,
    pub derived: BTreeMap<String, Value>,
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::io(path, std::io::ErrorKind::InvalidInput.into()))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(path, e)
    })
}

/// PDP as CSV. Rows are in sample order; `power_db` is relative to 1.0, the
/// level of a perfectly aligned clean path.
pub fn pdp_csv(pdp: &Pdp) -> String {
    let mut out = String::with_capacity(32 * (pdp.len() + 1));
    out.push_str(PDP_HEADER);
    out.push('\n');
    for (t, &p) in pdp.times().zip(pdp.powers()) {
        let db = if p > 0.0 {
            (10.0 * p.log10()).max(FLOOR_DB)
        } else {
            FLOOR_DB
        };
        writeln!(out, "{t},{p},{db}").expect("writing to a String");
    }
    out
}

pub fn emit_pdp_csv(pdp: &Pdp, path: &Path) -> Result<(), CliError> {
    write_atomic(path, pdp_csv(pdp).as_bytes())
}

/// Reads back `(time_s, power_linear, power_db)` rows.
pub fn parse_pdp_csv(text: &str) -> Result<Vec<(f64, f64, f64)>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(PDP_HEADER) {
        return Err(format!("missing header `{PDP_HEADER}`"));
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let f: Vec<f64> = l
                .split(',')
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|e| format!("row {}: {e}", i + 1))?;
            match f.as_slice() {
                &[t, p, db] => Ok((t, p, db)),
                _ => Err(format!("row {}: expected 3 fields", i + 1)),
            }
        })
        .collect()
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report values are finite");
    s.push('\n');
    s
}

pub fn emit_report_json(report: &Report, path: &Path) -> Result<(), CliError> {
    write_atomic(path, report_json(report).as_bytes())
}

pub fn parse_report_json(text: &str) -> Result<Report, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

/// One chip per line.
pub fn chips_text(chips: &[u8]) -> String {
    chips.iter().map(|c| format!("{c}\n")).collect()
}

/// JSON number for a finite value; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
