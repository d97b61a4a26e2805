//! Delimited-text readers shared by the mapping-table loaders.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) struct Row {
    pub line: usize,
    pub fields: Vec<String>,
}

/// Reads a headed table, checking the header names (case-insensitive) and
/// returning every data row as-is; column-count checks are left to callers.
pub(crate) fn read_table<R: Read>(
    input: R,
    origin: &Path,
    delimiter: u8,
    expected: &[&'static str],
) -> Result<Vec<Row>> {
    let csv_err = |source| Error::Csv {
        path: origin.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = reader.headers().map_err(csv_err)?.clone();
    let found: Vec<String> = header.iter().map(str::to_string).collect();
    let matches = found.len() == expected.len()
        && found.iter().zip(expected).all(|(f, e)| f.eq_ignore_ascii_case(e));
    if !matches {
        return Err(Error::Header {
            path: origin.to_path_buf(),
            expected: expected.to_vec(),
            found,
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        rows.push(Row {
            line,
            fields: record.iter().map(str::to_string).collect(),
        });
    }
    Ok(rows)
}

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
