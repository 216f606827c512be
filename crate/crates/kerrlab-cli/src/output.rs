//! Report envelope and file writers.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use kerrlab::KerrError;

use crate::CliError;

/// Result of one subcommand before it is wrapped in the envelope.
#[derive(Debug)]
pub struct Outcome {
    pub pass: bool,
    pub worst_point: Option<Value>,
    pub error: Option<KerrError>,
    pub report: Value,
    /// CSV files written to the output directory, relative to it.
    pub files: Vec<String>,
}

impl Outcome {
    pub fn pass(report: Value) -> Self {
        Self {
            pass: true,
            worst_point: None,
            error: None,
            report,
            files: Vec::new(),
        }
    }

    pub fn fail(worst_point: Value, error: Option<KerrError>, report: Value) -> Self {
        Self {
            pass: false,
            worst_point: Some(worst_point),
            error,
            report,
            files: Vec::new(),
        }
    }
}

#[derive(Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

impl ErrorInfo {
    pub fn new(e: &KerrError) -> Self {
        // the variant name, from the Debug form
        let dbg = format!("{e:?}");
        let kind = dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("").to_string();
        Self {
            kind,
            message: e.to_string(),
        }
    }
}

#[derive(Serialize)]
pub struct Envelope<'a> {
    pub schema: u32,
    pub command: &'a str,
    pub spin: f64,
    pub mass: f64,
    pub seed: u64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_point: Option<&'a Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    pub files: &'a [String],
    pub report: &'a Value,
}

/// Header row, then one serialized record per row, LF line endings.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}
