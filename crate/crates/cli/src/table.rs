//! CSV input and output with a `#` manifest preamble.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::manifest::RunManifest;

/// Shortest decimal that reads back to the same `f64`.
pub fn format_value(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_csv(
    path: &Path,
    manifest: &RunManifest,
    header: &[String],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    let io = |e: std::io::Error| CliError::io(path, e);
    for line in manifest.comment_lines() {
        writeln!(out, "{line}").map_err(io)?;
    }
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CliError::io(path, e);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format_value(*v)))
            .map_err(csv_err)?;
    }
    w.flush().map_err(io)
}

/// The `x1..xn` columns of a CSV file.
#[derive(Debug, Clone)]
pub struct Table {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_csv(path: &Path) -> CliResult<Table> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let parse = |line: u64, msg: String| CliError::Io(format!("{}:{line}: {msg}", path.display()));
    let headers = reader.headers().map_err(|e| CliError::io(path, e))?.clone();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(parse(
            1,
            "empty input, expected a header row x1,...,xn".into(),
        ));
    }
    let columns: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| is_x_column(h))
        .map(|(i, _)| i)
        .collect();
    for (k, &i) in columns.iter().enumerate() {
        if headers[i] != format!("x{}", k + 1) {
            return Err(parse(
                1,
                format!("expected column x{}, found '{}'", k + 1, &headers[i]),
            ));
        }
    }
    let n = columns.len();
    if n < 2 {
        return Err(parse(1, format!("need at least columns x1,x2, found {n}")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(n);
        for &i in &columns {
            let field = record.get(i).unwrap_or("");
            let v: f64 = field
                .parse()
                .map_err(|_| parse(line, format!("'{field}' is not a number")))?;
            if !v.is_finite() {
                return Err(parse(line, format!("'{field}' is not finite")));
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse(2, "no data rows".into()));
    }
    Ok(Table { n, rows })
}

fn is_x_column(h: &str) -> bool {
    h.strip_prefix('x')
        .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

pub fn x_header(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("x{k}")).collect()
}
