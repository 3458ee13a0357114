//! Trace file ingestion and output.
//!
//! Two formats are read:
//!
//! * plain: one decimal value per line; blank lines and lines starting with
//!   `#` are ignored.
//! * CSV: one column selected by header name or 0-based index. A header row is
//!   detected when the selected field of the first record is not a number.
//!
//! Files ending in `.csv` are read as CSV, everything else as plain text unless
//! a column is requested explicitly. Values are written with the shortest
//! decimal representation that parses back to the same `f64`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl ColumnSelector {
    /// Digits select by index, anything else by name.
    pub fn parse(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceFormat {
    Plain,
    Csv(ColumnSelector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub path: PathBuf,
    pub format: TraceFormat,
    pub series: TimeSeries,
}

/// Reads a trace, naming the series after the file stem.
pub fn read_trace(path: impl AsRef<Path>, column: Option<ColumnSelector>) -> Result<TraceFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let format = match (column, is_csv) {
        (Some(c), _) => TraceFormat::Csv(c),
        (None, true) => TraceFormat::Csv(ColumnSelector::Index(0)),
        (None, false) => TraceFormat::Plain,
    };
    let values = match &format {
        TraceFormat::Plain => parse_plain(&text, path)?,
        TraceFormat::Csv(c) => parse_csv(&text, path, c)?,
    };
    let series = TimeSeries::new(values).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(TraceFile {
        path: path.to_path_buf(),
        format,
        series: series.with_name(stem),
    })
}

fn parse_value(field: &str, path: &Path, line: usize) -> Result<f64> {
    let field = field.trim();
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("not a number: {field:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("non-finite value {field:?}"),
        });
    }
    Ok(v)
}

pub fn parse_plain(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        values.push(parse_value(line, path, i + 1)?);
    }
    Ok(values)
}

pub fn parse_csv(text: &str, path: &Path, column: &ColumnSelector) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut index: Option<usize> = match column {
        ColumnSelector::Index(i) => Some(*i),
        ColumnSelector::Name(_) => None,
    };
    let mut first = true;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if first {
            first = false;
            match column {
                ColumnSelector::Name(name) => {
                    let pos = record.iter().position(|f| f.trim() == name);
                    index = Some(pos.ok_or_else(|| Error::Parse {
                        path: path.to_path_buf(),
                        line,
                        message: format!("no column named {name:?} in header"),
                    })?);
                    continue;
                }
                ColumnSelector::Index(i) => {
                    let is_header = record
                        .get(*i)
                        .is_some_and(|f| f.trim().parse::<f64>().is_err());
                    if is_header {
                        continue;
                    }
                }
            }
        }
        let i = index.expect("column resolved before data rows");
        let field = record.get(i).ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("row has no column {i}"),
        })?;
        values.push(parse_value(field, path, line)?);
    }
    Ok(values)
}

/// Writes `series` in the plain format, preceded by `# `-prefixed comment lines.
pub fn write_plain(
    series: &TimeSeries,
    comments: &[String],
    mut out: impl Write,
) -> std::io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    for v in series.values() {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

pub fn write_plain_file(series: &TimeSeries, comments: &[String], path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io)?;
    let mut w = std::io::BufWriter::new(file);
    write_plain(series, comments, &mut w).map_err(io)?;
    w.flush().map_err(io)
}
