use std::fs;
use std::io::{self, Write};
use std::path::Path;

use randpivot::TraceRecord;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const TRACE_HEADER: [&str; 6] = ["t", "pivot", "gamma", "off_hat", "kappa_hat", "residual"];

/// Shortest decimal that round-trips, in positional form for moderate
/// magnitudes and exponent form otherwise.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Opens `path` for writing, or stdout for `-`.
pub fn sink(path: &Path) -> CliResult<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(io::stdout().lock()));
    }
    let f = fs::File::create(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Box::new(io::BufWriter::new(f)))
}

pub fn write_trace(path: &Path, trace: &[TraceRecord]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    w.write_record(TRACE_HEADER)?;
    for rec in trace {
        w.write_record([
            rec.t.to_string(),
            rec.pivot.as_ref().map(|p| p.to_string()).unwrap_or_default(),
            opt(rec.gamma),
            opt(rec.off_hat),
            opt(rec.kappa_hat),
            opt(rec.reconstruction_residual),
        ])?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes serializable rows as CSV with a header taken from the field names.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}
