//! Input loading, error classes and output rendering.

use std::io::Read;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

pub struct Context {
    pub input: Option<String>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub bound: Option<u64>,
    pub budget: u128,
}

/// A result to print. `accepted == false` marks a negative verdict or a
/// failed validation: the report is still printed, and the exit status is 2.
pub struct Outcome {
    pub value: Value,
    pub accepted: bool,
    /// Replaces the generic text rendering when set.
    pub text: Option<String>,
}

impl Outcome {
    pub fn ok<T: Serialize>(v: &T) -> Self {
        Self {
            value: to_value(v),
            accepted: true,
            text: None,
        }
    }

    pub fn verdict(value: Value, accepted: bool) -> Self {
        Self {
            value,
            accepted,
            text: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable input, or JSON that does not fit the subcommand's schema.
    #[error("malformed input: {0}")]
    Parse(String),
    /// Well-formed input rejected by a mathematical check.
    #[error("validation failed: {0}")]
    Invalid(String),
    #[error("budget exceeded: search volume {volume} > {budget}")]
    Budget { volume: u128, budget: u128 },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Budget { .. } => 3,
        }
    }

    pub fn report(&self) -> Option<Value> {
        match self {
            CliError::Parse(_) => None,
            CliError::Invalid(m) => Some(json!({ "valid": false, "error": m })),
            CliError::Budget { volume, budget } => Some(json!({
                "error": "budget exceeded",
                "volume": volume.to_string(),
                "budget": budget.to_string(),
            })),
        }
    }
}

pub fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("output types serialize to JSON")
}

impl Context {
    fn raw_input(&self) -> Result<String, CliError> {
        match self.input.as_deref() {
            None | Some("-") => {
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| CliError::Parse(format!("reading standard input: {e}")))?;
                Ok(s)
            }
            Some(s) if s.trim_start().starts_with(['{', '[']) => Ok(s.to_string()),
            Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{path}: {e}"))),
        }
    }

    pub fn value(&self) -> Result<Value, CliError> {
        let raw = self.raw_input()?;
        serde_json::from_str(&raw).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn bound(&self) -> u64 {
        self.bound.unwrap_or(1)
    }
}

pub fn parse<T: DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Parse(e.to_string()))
}

/// Deserializes the member `key` of an object.
pub fn field<T: DeserializeOwned>(v: &Value, key: &str) -> Result<T, CliError> {
    match v.get(key) {
        Some(x) => parse(x.clone()),
        None => Err(CliError::Parse(format!("missing field `{key}`"))),
    }
}

/// `key` when present, otherwise the whole value.
pub fn field_or_whole<T: DeserializeOwned>(v: &Value, key: &str) -> Result<T, CliError> {
    match v.get(key) {
        Some(x) => parse(x.clone()),
        None => parse(v.clone()),
    }
}

pub fn optional<T: DeserializeOwned>(v: &Value, key: &str) -> Result<Option<T>, CliError> {
    match v.get(key) {
        Some(Value::Null) | None => Ok(None),
        Some(x) => parse(x.clone()).map(Some),
    }
}

pub fn emit(v: &Value, text: bool) {
    if text {
        print!("{}", render_text(v));
    } else {
        println!("{}", serde_json::to_string_pretty(v).expect("JSON values print"));
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn is_flat(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn as_rows(v: &Value) -> Option<&Vec<Value>> {
    match v {
        Value::Object(m) if m.contains_key("entries") && m.contains_key("rows") => m["entries"].as_array(),
        Value::Array(rows) if !rows.is_empty() && rows.iter().all(|r| r.as_array().is_some_and(|r| r.iter().all(is_flat))) => {
            Some(rows)
        }
        _ => None,
    }
}

fn render_rows(rows: &[Value], indent: usize, out: &mut String) {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.as_array().map_or_else(Vec::new, |r| r.iter().map(scalar).collect()))
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    for r in cells {
        let line: Vec<String> = r.iter().map(|c| format!("{c:>width$}")).collect();
        out.push_str(&format!("{:indent$}[{}]\n", "", line.join(" ")));
    }
}

fn render_object(m: &Map<String, Value>, indent: usize, out: &mut String) {
    for (k, v) in m {
        render_entry(k, v, indent, out);
    }
}

fn render_entry(key: &str, v: &Value, indent: usize, out: &mut String) {
    let pad = "";
    if is_flat(v) {
        out.push_str(&format!("{pad:indent$}{key}: {}\n", scalar(v)));
    } else if let Some(rows) = as_rows(v) {
        out.push_str(&format!("{pad:indent$}{key}:\n"));
        render_rows(rows, indent + 2, out);
    } else {
        match v {
            Value::Array(items) if items.iter().all(is_flat) => {
                let items: Vec<String> = items.iter().map(scalar).collect();
                out.push_str(&format!("{pad:indent$}{key}: [{}]\n", items.join(", ")));
            }
            Value::Array(items) => {
                out.push_str(&format!("{pad:indent$}{key}:\n"));
                for (i, item) in items.iter().enumerate() {
                    render_entry(&format!("[{i}]"), item, indent + 2, out);
                }
            }
            Value::Object(m) => {
                out.push_str(&format!("{pad:indent$}{key}:\n"));
                render_object(m, indent + 2, out);
            }
            _ => unreachable!(),
        }
    }
}

/// Indented `key: value` rendering, with matrices printed as aligned rows.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(m) => render_object(m, 0, &mut out),
        other => render_entry("result", other, 0, &mut out),
    }
    out
}
