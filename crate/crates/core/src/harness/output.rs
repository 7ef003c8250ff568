//! CSV and JSON emission of sweep results.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::run::SweepResult;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "axis,value,method,mean_nmse,mean_runtime_s,trials,failures";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

/// Writes the CSV form of `result`. `NaN` marks a point where every trial
/// failed.
pub fn write_csv<W: Write>(result: &SweepResult, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for p in &result.points {
        let nmse = p.mean_nmse.map_or_else(|| "NaN".to_string(), |v| format!("{v:e}"));
        writeln!(
            out,
            "{},{},{},{},{:e},{},{}",
            result.axis,
            result.axis.format_value(p.value),
            p.method,
            nmse,
            p.mean_runtime_s,
            p.trials,
            p.failures
        )?;
    }
    Ok(())
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    write_csv(result, &mut out).map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

pub fn emit_json(result: &SweepResult, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    serde_json::to_writer_pretty(&mut out, result)?;
    writeln!(out).map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

pub fn read_json(path: &Path) -> Result<SweepResult> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}
