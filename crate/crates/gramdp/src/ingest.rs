//! CSV loading and numeric-column extraction.
//!
//! Input files are UTF-8, comma-delimited, with a header row and optional
//! RFC-4180 double-quote quoting. Numeric cells use a decimal point and no
//! thousands separators. Empty, NaN and infinite cells are rejected rather
//! than imputed: the data must be cleaned before it is queried.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

pub use gramdp_core::column::{clamp_to_bounds, infer_bounds, NumericColumn};

use crate::error::{AppError, Result};

/// Header plus rows of raw text cells; every row has `header.len()` cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>, rows: Vec<Vec<String>>) -> Result<Self> {
        if header.is_empty() {
            return Err(AppError::MalformedCsv {
                line: 1,
                message: "header has no columns".into(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != header.len() {
                return Err(AppError::RaggedRow {
                    line: i as u64 + 2,
                    expected: header.len(),
                    found: row.len(),
                });
            }
        }
        Ok(Self { header, rows })
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Table> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => AppError::FileNotFound(path.to_path_buf()),
        _ => AppError::Io(e),
    })?;
    read_csv(file)
}

fn malformed(e: csv::Error) -> AppError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => AppError::Io(io),
        kind => AppError::MalformedCsv {
            line,
            message: format!("{kind:?}"),
        },
    }
}

pub fn read_csv<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header: Vec<String> = match records.next() {
        Some(rec) => rec.map_err(malformed)?.iter().map(str::to_owned).collect(),
        None => {
            return Err(AppError::MalformedCsv {
                line: 1,
                message: "missing header row".into(),
            })
        }
    };
    if header.iter().all(String::is_empty) && header.len() <= 1 {
        return Err(AppError::MalformedCsv {
            line: 1,
            message: "header has no columns".into(),
        });
    }

    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(malformed)?;
        if rec.len() != header.len() {
            return Err(AppError::RaggedRow {
                line: rec.position().map(|p| p.line()).unwrap_or(0),
                expected: header.len(),
                found: rec.len(),
            });
        }
        rows.push(rec.iter().map(str::to_owned).collect());
    }
    Ok(Table { header, rows })
}

pub fn write_csv<W: Write>(table: &Table, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io_err = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => AppError::Io(io),
        kind => AppError::Io(io::Error::other(format!("{kind:?}"))),
    };
    w.write_record(&table.header).map_err(io_err)?;
    for row in &table.rows {
        w.write_record(row).map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses one cell as a finite decimal number.
pub fn parse_number(cell: &str) -> Option<f64> {
    let s = cell.trim();
    let plain = s
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'));
    if !plain || !s.bytes().any(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Extracts column `name`. Rows are numbered from 1, excluding the header.
pub fn select_numeric_column(t: &Table, name: &str) -> Result<NumericColumn> {
    let idx = t
        .column_index(name)
        .ok_or_else(|| AppError::NoSuchColumn(name.to_owned()))?;
    let mut values = Vec::with_capacity(t.rows.len());
    for (i, row) in t.rows.iter().enumerate() {
        let cell = &row[idx];
        if cell.trim().is_empty() {
            return Err(AppError::EmptyCell { row: i + 1 });
        }
        let v = parse_number(cell).ok_or_else(|| AppError::NonNumericCell {
            row: i + 1,
            content: cell.clone(),
        })?;
        values.push(v);
    }
    Ok(NumericColumn::new(name, values)?)
}
