//! Atomic file output and plain numeric input.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Float with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows of a CSV table whose cells are already formatted.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(output_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(output_err)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }
}

fn output_err(e: impl std::fmt::Display) -> CliError {
    CliError::Output(e.to_string())
}

/// Writes `bytes` to `dir/name` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    let target = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::Output(format!("{}: {e}", target.display())))?;
    tmp.persist(&target)
        .map_err(|e| CliError::Output(format!("{}: {}", target.display(), e.error)))?;
    Ok(target)
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(output_err)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// First `ncols` numeric columns of a comma-separated file. Lines that start
/// with `#` and a non-numeric header row are skipped.
pub fn read_columns(path: &Path, ncols: usize) -> CliResult<Vec<Vec<f64>>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(CliError::MissingFile(path.into()))
        }
        Err(e) => return Err(CliError::Config(format!("{}: {e}", path.display()))),
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut cols = vec![Vec::new(); ncols];
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if record.len() < ncols {
            return Err(CliError::Config(format!(
                "{}: line {} has {} column(s), expected {ncols}",
                path.display(),
                i + 1,
                record.len()
            )));
        }
        let parsed: Result<Vec<f64>, _> =
            record.iter().take(ncols).map(str::parse::<f64>).collect();
        match parsed {
            Ok(values) => values
                .into_iter()
                .zip(cols.iter_mut())
                .for_each(|(v, c)| c.push(v)),
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(CliError::Config(format!(
                    "{}: line {}: {e}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    if cols[0].is_empty() {
        return Err(CliError::Config(format!(
            "{}: no data rows",
            path.display()
        )));
    }
    Ok(cols)
}
