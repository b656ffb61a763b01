//! Strict delimited numeric ingestion.
//!
//! The accepted format is deliberately minimal: one numeric field per column,
//! fields never contain the delimiter, decimal point only. Lines starting
//! with `#` and fully empty lines are skipped; with a header enabled the
//! first remaining line is dropped. Everything else is an error with a
//! 1-based position.

use std::fmt;
use std::fs;
use std::path::Path;

use composite_core::IndicatorMatrix;
use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum ReadError {
    Io { path: String, message: String },
    EmptyFile { path: String },
    ParseError { line: usize, column: usize, field: String },
    RaggedRows { line: usize, expected: usize, actual: usize },
    Invalid(String),
}

impl fmt::Display for ReadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReadError::Io { path, message } => write!(f, "io: {path}: {message}"),
            ReadError::EmptyFile { path } => write!(f, "empty input: {path}"),
            ReadError::ParseError { line, column, field } => {
                write!(f, "parse: line {line}, column {column}: {field:?} is not a finite number")
            }
            ReadError::RaggedRows { line, expected, actual } => {
                write!(f, "ragged rows: line {line} has {actual} fields, expected {expected}")
            }
            ReadError::Invalid(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

/// Reads an n x p numeric table. `has_header` drops the first non-comment
/// line without parsing it.
pub fn read_indicators(
    path: &Path,
    delimiter: char,
    has_header: bool,
) -> Result<IndicatorMatrix, ReadError> {
    let text = fs::read_to_string(path).map_err(|e| ReadError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let rows = parse_table(&text, delimiter, has_header)?;
    if rows.is_empty() {
        return Err(ReadError::EmptyFile {
            path: path.display().to_string(),
        });
    }
    let n = rows.len();
    let p = rows[0].len();
    let values = DMatrix::from_fn(n, p, |i, j| rows[i][j]);
    IndicatorMatrix::new(values).map_err(|e| ReadError::Invalid(e.to_string()))
}

/// Parses the body of a delimited numeric table into rows.
pub fn parse_table(
    text: &str,
    delimiter: char,
    has_header: bool,
) -> Result<Vec<Vec<f64>>, ReadError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut expected: Option<usize> = None;
    let mut header_pending = has_header;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if header_pending {
            header_pending = false;
            continue;
        }
        let fields: Vec<&str> = line.split(delimiter).collect();
        if let Some(p) = expected {
            if fields.len() != p {
                return Err(ReadError::RaggedRows {
                    line: line_no,
                    expected: p,
                    actual: fields.len(),
                });
            }
        } else {
            expected = Some(fields.len());
        }
        let mut row = Vec::with_capacity(fields.len());
        for (col, field) in fields.iter().enumerate() {
            let trimmed = field.trim();
            let value: f64 = trimmed.parse().map_err(|_| ReadError::ParseError {
                line: line_no,
                column: col + 1,
                field: trimmed.to_string(),
            })?;
            if !value.is_finite() {
                return Err(ReadError::ParseError {
                    line: line_no,
                    column: col + 1,
                    field: trimmed.to_string(),
                });
            }
            row.push(value);
        }
        rows.push(row);
    }
    Ok(rows)
}
