use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// JSON value of a float; non-finite values become the strings
/// `"inf"`, `"-inf"` and `"nan"`, and `-0.0` is written as `0.0`.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        serde_json::Number::from_f64(v + 0.0).map_or(Value::Null, Value::Number)
    } else if v.is_nan() {
        Value::String("nan".into())
    } else if v > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

/// Inverse of [`num`].
pub fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            _ => None,
        },
        _ => None,
    }
}

/// One computed quantity with everything needed to reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub command: String,
    pub label: String,
    pub params: BTreeMap<String, Value>,
    pub outputs: BTreeMap<String, Value>,
    pub tolerances: BTreeMap<String, Value>,
    pub passed: bool,
    pub error: Option<String>,
}

impl Record {
    pub fn new(command: &str, label: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            label: label.into(),
            params: BTreeMap::new(),
            outputs: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            passed: true,
            error: None,
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.into(), v.into());
        self
    }

    pub fn set_param(&mut self, key: &str, v: impl Into<Value>) {
        self.params.insert(key.into(), v.into());
    }

    pub fn out(&mut self, key: &str, v: impl Into<Value>) {
        self.outputs.insert(key.into(), v.into());
    }

    pub fn out_f(&mut self, key: &str, v: f64) {
        self.outputs.insert(key.into(), num(v));
    }

    pub fn tol(&mut self, key: &str, v: f64) {
        self.tolerances.insert(key.into(), num(v));
    }

    pub fn fail(mut self, err: &Error) -> Self {
        self.passed = false;
        self.error = Some(err.to_string());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub commands: Vec<String>,
    /// SHA-256 of the canonical JSON of the effective configuration.
    pub config_hash: String,
    /// Content hash of the space, if one was built.
    pub space_hash: Option<String>,
    pub space_vertices: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub provenance: Provenance,
    pub config: Value,
    pub records: Vec<Record>,
}

pub const TSV_COLUMNS: [&str; 7] = ["command", "label", "passed", "error", "section", "key", "value"];

impl Report {
    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are plain JSON");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }

    /// Long format: one row per parameter, output and tolerance.
    pub fn to_tsv(&self) -> String {
        let mut out = TSV_COLUMNS.join("\t");
        out.push('\n');
        let cell = |v: &Value| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        for r in &self.records {
            let err = r.error.as_deref().unwrap_or("").replace(['\t', '\n'], " ");
            for (section, map) in [("param", &r.params), ("output", &r.outputs), ("tolerance", &r.tolerances)] {
                for (k, v) in map {
                    let row = [
                        r.command.clone(),
                        r.label.clone(),
                        r.passed.to_string(),
                        err.clone(),
                        section.to_string(),
                        k.clone(),
                        cell(v).replace(['\t', '\n'], " "),
                    ];
                    out.push_str(&row.join("\t"));
                    out.push('\n');
                }
            }
            if r.params.is_empty() && r.outputs.is_empty() && r.tolerances.is_empty() {
                let row = [r.command.clone(), r.label.clone(), r.passed.to_string(), err, String::new(), String::new(), String::new()];
                out.push_str(&row.join("\t"));
                out.push('\n');
            }
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        std::fs::write(dir.join("records.tsv"), self.to_tsv())?;
        Ok(())
    }
}
