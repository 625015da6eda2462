//! Report emission.
//!
//! Every command builds one JSON value. The structured artifact is that
//! value pretty-printed; the table is rendered from the same value. Run
//! metadata (input digests, timings) goes to a `<out>.meta.json` sidecar so
//! reports stay byte-identical across runs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Output selector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Structured,
    Table,
}

pub fn to_value<T: Serialize>(value: &T) -> Result<Value> {
    serde_json::to_value(value).map_err(|e| Error::Internal(e.to_string()))
}

pub fn to_pretty_json(value: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Renders a report value as aligned plain-text tables.
///
/// Scalars of an object become `key  value` rows, arrays of objects become
/// column tables and nested objects become titled sections. Floats show four
/// decimals.
pub fn render_table(value: &Value) -> String {
    let mut out = String::new();
    section(&mut out, "", value);
    out
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => format!("{:.4}", n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn heading(out: &mut String, title: &str) {
    if !out.is_empty() {
        out.push('\n');
    }
    let _ = writeln!(out, "[{title}]");
}

fn section(out: &mut String, title: &str, value: &Value) {
    match value {
        Value::Object(map) => {
            let scalars: Vec<_> = map.iter().filter(|(_, v)| is_scalar(v)).collect();
            if !scalars.is_empty() {
                if !title.is_empty() {
                    heading(out, title);
                }
                let width = scalars.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
                for (k, v) in scalars {
                    let _ = writeln!(out, "{k:<width$}  {}", cell(v));
                }
            }
            for (k, v) in map.iter().filter(|(_, v)| !is_scalar(v)) {
                section(out, &join(title, k), v);
            }
        }
        Value::Array(items) => {
            heading(out, title);
            if items.is_empty() {
                out.push_str("(none)\n");
            } else if items.iter().all(|i| matches!(i, Value::Object(_))) {
                table(out, items);
            } else if items.iter().all(|i| matches!(i, Value::Array(_))) {
                matrix(out, items);
            } else {
                for i in items {
                    let _ = writeln!(out, "{}", cell(i));
                }
            }
        }
        scalar => {
            let _ = writeln!(out, "{title}  {}", cell(scalar));
        }
    }
}

fn table(out: &mut String, rows: &[Value]) {
    let mut columns: Vec<&str> = Vec::new();
    for row in rows {
        if let Value::Object(m) = row {
            for k in m.keys() {
                if !columns.contains(&k.as_str()) {
                    columns.push(k);
                }
            }
        }
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|row| columns.iter().map(|c| row.get(*c).map_or_else(String::new, cell)).collect())
        .collect();
    let widths: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|r| r[i].chars().count()).chain([c.chars().count()]).max().unwrap_or(0))
        .collect();
    write_row(out, columns.iter().map(|c| c.to_string()), &widths);
    for r in cells {
        write_row(out, r.into_iter(), &widths);
    }
}

fn matrix(out: &mut String, rows: &[Value]) {
    let cells: Vec<Vec<String>> =
        rows.iter().map(|r| r.as_array().map(|a| a.iter().map(cell).collect()).unwrap_or_default()).collect();
    let width = cells.iter().flatten().map(|c| c.chars().count()).max().unwrap_or(0);
    for r in cells {
        let n = r.len();
        write_row(out, r.into_iter(), &vec![width; n]);
    }
}

fn write_row(out: &mut String, cells: impl Iterator<Item = String>, widths: &[usize]) {
    let mut line = String::new();
    for (c, w) in cells.zip(widths) {
        if !line.is_empty() {
            line.push_str("  ");
        }
        let _ = write!(line, "{c:<w$}");
    }
    out.push_str(line.trim_end());
    out.push('\n');
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &Path) -> Result<Self> {
        let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(Self { path: path.display().to_string(), bytes: data.len() as u64, sha256: sha256_hex(&data) })
    }
}

/// Contents of the metadata sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub command: String,
    pub version: &'static str,
    pub args: Value,
    pub inputs: Vec<InputDigest>,
    pub exit_code: u8,
    pub started_unix_ms: u128,
    pub elapsed_ms: u128,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}
