//! Report assembly, output formats and exit codes.

use std::fmt;
use std::io::Write;

use besico::rational::q_json;
use besico::{Error, Q};
use serde::Serialize;
use serde_json::{json, Map, Value};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything that can stop a run, with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: schema, parameter, parse, mismatch or range errors.
    Input(String),
    Resource(String),
    Invariant(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Resource(m) => write!(f, "resource limit: {m}"),
            CliError::Invariant(m) => write!(f, "invariant breach: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Resource(_) => CliError::Resource(e.to_string()),
            Error::Invariant(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn input<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Input(msg.into()))
}

/// A column-oriented series for CSV export.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// What a subcommand produces: results, an optional table, and the
/// message of a failed check (reported, then exit 4).
pub struct Outcome {
    pub results: Value,
    pub table: Option<Table>,
    pub failed: Option<String>,
}

impl Outcome {
    pub fn new(results: Value) -> Self {
        Outcome { results, table: None, failed: None }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn fail_unless(mut self, ok: bool, msg: impl Into<String>) -> Self {
        if !ok && self.failed.is_none() {
            self.failed = Some(msg.into());
        }
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub version: &'static str,
    pub inputs: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

pub fn rq(x: &Q) -> Value {
    q_json(x)
}

/// Serialize any report fragment; serde failures here are bugs.
pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Object(m) if m.len() == 2 && m.contains_key("num") && m.contains_key("den") => {
            let part = |k: &str| match &m[k] {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            match part("den").as_str() {
                "1" => part("num"),
                den => format!("{}/{den}", part("num")),
            }
        }
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) if !(m.len() == 2 && m.contains_key("num") && m.contains_key("den")) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        _ => out.push((prefix.to_string(), csv_cell(v))),
    }
}

impl Report {
    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// The table when there is one, otherwise `key,value` rows of the
    /// flattened results.
    pub fn render_csv(&self) -> String {
        let mut s = String::new();
        match &self.table {
            Some(t) => {
                s.push_str(&t.columns.join(","));
                s.push('\n');
                for row in &t.rows {
                    s.push_str(&row.iter().map(csv_cell).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
            }
            None => {
                s.push_str("key,value\n");
                let mut rows = Vec::new();
                flatten("", &self.results, &mut rows);
                for (k, v) in rows {
                    s.push_str(&format!("{k},{v}\n"));
                }
            }
        }
        s
    }
}

pub fn write_output(text: &str, path: Option<&str>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{p}: {e}"))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

/// `{"k": v, ...}` from pairs.
pub fn obj(pairs: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

pub fn null_if_none<T: Serialize>(x: Option<T>) -> Value {
    x.map(|v| to_value(&v)).unwrap_or(json!(null))
}
