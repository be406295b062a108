//! Files written for a run: `run.json`, `audit.json`, and, when pairs were
//! found, `eigenpairs.csv` plus one field dump per pair.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use orlicz_spectra::field::io::write_field;
use serde::Serialize;

use crate::commands::{RunError, RunRecord};

pub const EIGENPAIRS_HEADER: &str = "lambda,energy,residual,lambda_recovered,sobolev_norm,field_file";

fn io_err(path: &Path, e: impl std::fmt::Display) -> RunError {
    RunError::Io(format!("{}: {e}", path.display()))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), RunError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn eigenpairs_csv(record: &RunRecord) -> String {
    let mut out = String::from(EIGENPAIRS_HEADER);
    out.push('\n');
    for p in record.pairs() {
        let e = &p.pair;
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
            e.lambda, e.energy, e.residual, e.lambda_recovered, e.sobolev_norm, p.field_file
        ));
    }
    out
}

/// Writes every artifact into `dir`, creating it if needed. Returns the
/// paths written, in a fixed order.
pub fn write_artifacts(record: &RunRecord, dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();
    let run = dir.join("run.json");
    write_json(&run, record)?;
    written.push(run);
    let audit = dir.join("audit.json");
    write_json(&audit, &record.audit)?;
    written.push(audit);
    let pairs = record.pairs();
    if pairs.is_empty() {
        return Ok(written);
    }
    let csv = dir.join("eigenpairs.csv");
    fs::write(&csv, eigenpairs_csv(record)).map_err(|e| io_err(&csv, e))?;
    written.push(csv);
    for p in pairs {
        let path = dir.join(&p.field_file);
        let file = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        let mut w = BufWriter::new(file);
        write_field(&p.pair.u, &mut w).map_err(|e| io_err(&path, e))?;
        w.flush().map_err(|e| io_err(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
