//! File formats: CSV sample grids and JSON inputs given inline or by path.

use std::fs;
use std::path::{Path, PathBuf};

use hiconvex_core::divided_differences::SampleGrid;
use serde::de::DeserializeOwned;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: expected header `x,f`, found `{found}`")]
    Header { path: PathBuf, found: String },
    #[error("{path}:{line}: malformed row: {message}")]
    Malformed { path: PathBuf, line: u64, message: String },
    #[error("{path}:{line}: abscissa {x} does not exceed the previous row's {prev}")]
    Unsorted { path: PathBuf, line: u64, x: f64, prev: f64 },
    #[error("{path}: {source}")]
    Grid {
        path: PathBuf,
        #[source]
        source: hiconvex_core::Error,
    },
    #[error("{origin}:{line}:{column}: {message}")]
    Json { origin: String, line: usize, column: usize, message: String },
    #[error("{origin}: {message}")]
    Invalid { origin: String, message: String },
}

/// Reads a two-column `x,f` CSV into a validated grid. Rows must be
/// strictly increasing in `x`.
pub fn ingest_samples(path: &Path) -> Result<SampleGrid, IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.into(), source })?;
    parse_samples(&text, path)
}

/// As [`ingest_samples`] on text already in memory; `path` labels errors.
pub fn parse_samples(text: &str, path: &Path) -> Result<SampleGrid, IngestError> {
    let malformed = |line: u64, message: String| IngestError::Malformed { path: path.into(), line, message };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| malformed(1, e.to_string()))?.clone();
    if header.len() != 2 || &header[0] != "x" || &header[1] != "f" {
        return Err(IngestError::Header { path: path.into(), found: header.iter().collect::<Vec<_>>().join(",") });
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &str| -> Result<f64, IngestError> {
            let raw = &record[i];
            let v: f64 = raw.parse().map_err(|_| malformed(line, format!("{name} = `{raw}` is not a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(malformed(line, format!("{name} = `{raw}` is not finite")))
            }
        };
        let (x, f) = (field(0, "x")?, field(1, "f")?);
        if let Some(&prev) = xs.last() {
            if x <= prev {
                return Err(IngestError::Unsorted { path: path.into(), line, x, prev });
            }
        }
        xs.push(x);
        ys.push(f);
    }
    SampleGrid::new(xs, ys).map_err(|source| IngestError::Grid { path: path.into(), source })
}

/// Writes a grid as `x,f` CSV.
pub fn write_samples(grid: &SampleGrid, path: &Path) -> Result<(), IngestError> {
    let io = |source| IngestError::Io { path: path.into(), source };
    let mut w = csv::Writer::from_path(path).map_err(|e| io(e.into()))?;
    w.write_record(["x", "f"]).map_err(|e| io(e.into()))?;
    for (x, f) in grid.xs().iter().zip(grid.ys()) {
        w.write_record([x.to_string(), f.to_string()]).map_err(|e| io(e.into()))?;
    }
    w.flush().map_err(io)
}

fn json_error(origin: &str, e: serde_json::Error) -> IngestError {
    IngestError::Json { origin: origin.into(), line: e.line(), column: e.column(), message: e.to_string() }
}

/// Parses JSON text; errors name `origin` with line and column.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, IngestError> {
    serde_json::from_str(text).map_err(|e| json_error(origin, e))
}

/// An input given either inline or as a path to a JSON file. A string
/// whose first non-blank character is `{` or `[` is inline JSON.
pub fn load_json<T: DeserializeOwned>(arg: &str) -> Result<T, IngestError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return parse_json(arg, "<inline>");
    }
    let path = Path::new(arg);
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.into(), source })?;
    parse_json(&text, &path.display().to_string())
}

/// Converts an already parsed JSON value; a string is read as a path
/// relative to `base`.
pub fn from_value<T: DeserializeOwned>(value: &serde_json::Value, base: &Path) -> Result<T, IngestError> {
    match value {
        serde_json::Value::String(p) => {
            let path = base.join(p);
            let text = fs::read_to_string(&path).map_err(|source| IngestError::Io { path: path.clone(), source })?;
            parse_json(&text, &path.display().to_string())
        }
        v => T::deserialize(v).map_err(|e| IngestError::Invalid { origin: "<config>".into(), message: e.to_string() }),
    }
}
