use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Envelope printed for every command.
#[derive(Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs_digest: String,
    pub seed: u64,
    pub results: Value,
    pub elapsed_ms: u64,
    pub version: String,
}

/// Tracks argv and every input file read, for the digest.
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    pub fn new(argv: &[String]) -> Self {
        let mut hasher = Sha256::new();
        for a in argv {
            hasher.update(a.as_bytes());
            hasher.update([0u8]);
        }
        Inputs { hasher }
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.hasher.update(path.to_string_lossy().as_bytes());
        self.hasher.update([0u8]);
        self.hasher.update(text.as_bytes());
        self.hasher.update([0u8]);
        Ok(text)
    }

    pub fn digest(self) -> String {
        hex::encode(self.hasher.finalize())
    }
}

/// What a command produced.
pub struct Outcome {
    pub results: Value,
    /// Rows for `--format csv`; defaults to one row of the scalar fields.
    pub table: Option<Table>,
    /// Verdict-style failure (violation, stuck walk, no line): exit code 1.
    pub failed: bool,
}

impl Outcome {
    pub fn ok(results: Value) -> Self {
        Outcome {
            results,
            table: None,
            failed: false,
        }
    }

    pub fn failed_if(mut self, failed: bool) -> Self {
        self.failed = failed;
        self
    }
}

pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    /// Scalars become cells; nested values are embedded as JSON text.
    pub fn from_object(value: &Value) -> Table {
        let mut headers = Vec::new();
        let mut row = Vec::new();
        if let Value::Object(map) = value {
            for (k, v) in map {
                headers.push(k.clone());
                row.push(cell(v));
            }
        }
        Table {
            headers,
            rows: vec![row],
        }
    }
}

pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    }
}
