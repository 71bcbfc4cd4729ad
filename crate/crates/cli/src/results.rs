//! CSV result and bound files.
//!
//! Rows are appended and flushed one at a time, so an interrupted campaign
//! loses at most the run in flight.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use probjss::ResultRow;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Output of the `bound` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub instance: String,
    pub q_mode: String,
    pub q: f64,
    pub bound: f64,
    pub proven: bool,
    pub label: String,
    pub time_limit: Option<f64>,
    pub wall_seconds: f64,
}

/// Appends serialized rows to a file, or writes them to stdout.
pub struct RowSink {
    writer: csv::Writer<Box<dyn Write>>,
}

impl RowSink {
    /// Appends to `path`; the header is written only if the file is new or empty.
    pub fn append(path: &Path) -> CliResult<Self> {
        let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        Ok(Self::from_writer(Box::new(file), fresh))
    }

    pub fn stdout() -> Self {
        Self::from_writer(Box::new(io::stdout()), true)
    }

    pub fn from_writer(w: Box<dyn Write>, header: bool) -> Self {
        RowSink {
            writer: csv::WriterBuilder::new().has_headers(header).from_writer(w),
        }
    }

    pub fn open(path: Option<&Path>) -> CliResult<Self> {
        match path {
            Some(p) => Self::append(p),
            None => Ok(Self::stdout()),
        }
    }

    pub fn write<T: Serialize>(&mut self, row: &T) -> CliResult<()> {
        self.writer.serialize(row)?;
        self.writer.flush()?;
        Ok(())
    }
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let file = File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    csv::Reader::from_reader(file)
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// `path` itself, or the `.csv` files directly inside it, sorted.
pub fn csv_files(path: &Path) -> CliResult<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    files.sort();
    Ok(files)
}

pub fn read_results(paths: &[PathBuf]) -> CliResult<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for path in paths {
        for file in csv_files(path)? {
            rows.extend(read_csv::<ResultRow>(&file)?);
        }
    }
    Ok(rows)
}

/// Per-instance bounds from a bound file, or, for a result file, the
/// smallest `D` seen per instance.
pub fn load_bounds(path: &Path) -> CliResult<BTreeMap<String, f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let is_bound_file = reader.headers()?.iter().any(|h| h == "bound");
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    let mut keep_min = |inst: String, v: f64| {
        let e = out.entry(inst).or_insert(f64::INFINITY);
        *e = e.min(v);
    };
    if is_bound_file {
        for row in read_csv::<BoundRow>(path)? {
            keep_min(row.instance, row.bound);
        }
    } else {
        for row in read_csv::<ResultRow>(path)? {
            keep_min(row.instance, row.d_last);
        }
    }
    Ok(out)
}
