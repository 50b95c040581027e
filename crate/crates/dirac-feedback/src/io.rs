//! CSV and JSON output.
//!
//! Every CSV starts with one `#` comment line holding the invocation and a
//! hash of the configuration that produced it, followed by a header row.
//! Numbers use the shortest representation that round-trips.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::boundary::BoundaryTrace;
use crate::error::{Error, Result};
use crate::pde::PdeState;
use crate::survey::SurveyReport;

/// Provenance written into the comment line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvMeta {
    pub invocation: String,
    pub config_hash: String,
}

impl CsvMeta {
    pub fn new(invocation: impl Into<String>, config: &impl Serialize) -> Result<Self> {
        Ok(Self { invocation: invocation.into(), config_hash: config_hash(config)? })
    }

    pub fn comment_line(&self) -> String {
        format!("# invocation: {} | config_hash: {}", self.invocation.replace('\n', " "), self.config_hash)
    }
}

/// First 16 hex digits of the SHA-256 of the configuration's JSON form.
pub fn config_hash(config: &impl Serialize) -> Result<String> {
    let bytes = serde_json::to_vec(config).map_err(|e| Error::Parse(e.to_string()))?;
    let digest = Sha256::digest(&bytes);
    Ok(hex::encode(&digest[..8]))
}

pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.is_finite() && (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

/// Serialises the comment line, the header and the rows to a string.
pub fn csv_string(meta: &CsvMeta, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut out = Vec::new();
    writeln!(out, "{}", meta.comment_line())?;
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
        w.write_record(header).map_err(csv_error)?;
        for row in rows {
            w.write_record(&row).map_err(csv_error)?;
        }
        w.flush()?;
    }
    String::from_utf8(out).map_err(|e| Error::Parse(e.to_string()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

pub fn write_columns(path: &Path, meta: &CsvMeta, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    let n = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != n) || columns.len() != header.len() {
        return Err(Error::InvalidConfig("CSV columns must have equal length and match the header".into()));
    }
    let rows = (0..n).map(|i| columns.iter().map(|c| format_number(c[i])).collect());
    write_file(path, &csv_string(meta, header, rows)?)
}

pub const TRACE_HEADER: [&str; 5] = ["t", "u_plus", "u_minus", "u_right", "u_left"];

pub fn write_trace(path: &Path, meta: &CsvMeta, trace: &BoundaryTrace) -> Result<()> {
    write_columns(
        path,
        meta,
        &TRACE_HEADER,
        &[&trace.t_grid, &trace.u_plus, &trace.u_minus, &trace.u_right, &trace.u_left],
    )
}

/// Snapshot layout: a `time` row, then `x,u` rows.
pub fn write_snapshot(path: &Path, meta: &CsvMeta, state: &PdeState) -> Result<()> {
    let mut rows = vec![vec!["time".to_string(), format_number(state.time)], vec!["x".into(), "u".into()]];
    rows.extend(state.x_grid.iter().zip(&state.values).map(|(x, u)| vec![format_number(*x), format_number(*u)]));
    let mut out = Vec::new();
    writeln!(out, "{}", meta.comment_line())?;
    {
        let mut w = csv::WriterBuilder::new()
            .flexible(true)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        for row in rows {
            w.write_record(&row).map_err(csv_error)?;
        }
        w.flush()?;
    }
    write_file(path, &String::from_utf8(out).map_err(|e| Error::Parse(e.to_string()))?)
}

pub const SURVEY_HEADER: [&str; 6] = ["a", "beta", "class", "min_value", "argmin_t", "ratio"];

pub fn survey_csv(meta: &CsvMeta, report: &SurveyReport) -> Result<String> {
    let rows = report.points.iter().map(|p| {
        vec![
            format_number(p.a),
            format_number(p.beta),
            p.classification.as_str().to_string(),
            format_number(p.diagnostics.min_value),
            format_number(p.diagnostics.argmin_t),
            format_number(p.diagnostics.ratio),
        ]
    });
    csv_string(meta, &SURVEY_HEADER, rows)
}

pub fn write_survey(path: &Path, meta: &CsvMeta, report: &SurveyReport) -> Result<()> {
    write_file(path, &survey_csv(meta, report)?)
}

/// Class counts plus the configuration echo.
pub fn survey_summary(report: &SurveyReport, meta: &CsvMeta) -> serde_json::Value {
    serde_json::json!({
        "preset": report.config.name,
        "config_hash": meta.config_hash,
        "seed": report.config.seed,
        "window": report.config.criteria.window,
        "epsilon": report.config.criteria.epsilon,
        "ratio": report.config.criteria.ratio,
        "n_samples": report.points.len(),
        "counts": report.counts,
    })
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    write_file(path, &s)
}

/// A parsed numeric CSV: the comment line, the header and the columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comment: String,
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.header.iter().position(|h| h == name).map(|i| self.columns[i].as_slice())
    }
}

/// Reads a CSV written by [`write_columns`]; every field must be numeric.
pub fn read_table(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path)?;
    let (comment, body) = match text.split_once('\n') {
        Some((first, rest)) if first.starts_with('#') => (first.to_string(), rest),
        _ => (String::new(), text.as_str()),
    };
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = r.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    let mut columns = vec![Vec::new(); header.len()];
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        for (i, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse(format!("non-numeric field '{field}'")))?;
            columns[i].push(v);
        }
    }
    Ok(Table { comment, header, columns })
}
