use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use sqrank::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// Why a command did not produce a result.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or malformed input. Exit 2.
    Input(String),
    /// A well-formed question the tool could not settle. Exit 1.
    Domain { kind: &'static str, message: String },
}

impl Failure {
    pub fn input(msg: impl Into<String>) -> Self {
        Failure::Input(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Domain { .. } => 1,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Input(m) => json!({ "kind": "input", "message": m }),
            Failure::Domain { kind, message } => json!({ "kind": kind, "message": message }),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::Input(_) | Error::Validation(_) => return Failure::Input(e.to_string()),
            Error::ArityOverflow { .. } => "arity_overflow",
            Error::InsufficientBudget { .. } => "insufficient_budget",
            Error::TooLarge(_) => "too_large",
        };
        Failure::Domain { kind, message: e.to_string() }
    }
}

/// What a command produced. `ok == false` is a negative answer (an extraction
/// that failed, a pattern that does not embed) and exits 1.
pub struct Outcome {
    pub ok: bool,
    pub result: Value,
    pub certificate: Value,
}

impl Outcome {
    pub fn ok(result: Value, certificate: Value) -> Self {
        Outcome { ok: true, result, certificate }
    }
}

/// Input files read by a command, with their digests.
#[derive(Default)]
pub struct Inputs {
    files: Vec<Value>,
}

impl Inputs {
    pub fn read(&mut self, role: &str, path: &Path) -> Result<String, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        self.files.push(json!({
            "role": role,
            "path": path.display().to_string(),
            "sha256": hex::encode(Sha256::digest(&bytes)),
        }));
        String::from_utf8(bytes).map_err(|_| Failure::input(format!("{}: not UTF-8", path.display())))
    }

    pub fn json(&mut self, role: &str, path: &Path) -> Result<Value, Failure> {
        let text = self.read(role, path)?;
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
    }
}

pub struct Report {
    pub command: Option<String>,
    pub argv: Vec<String>,
    pub inputs: Inputs,
    pub outcome: Result<Outcome, Failure>,
    pub seconds: Option<f64>,
}

impl Report {
    pub fn exit_code(&self) -> u8 {
        match &self.outcome {
            Ok(o) if o.ok => 0,
            Ok(_) => 1,
            Err(f) => f.exit_code(),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), json!(SCHEMA_VERSION));
        m.insert("command".into(), json!({ "name": self.command, "argv": self.argv }));
        m.insert("inputs".into(), Value::Array(self.inputs.files.clone()));
        match &self.outcome {
            Ok(o) => {
                m.insert("status".into(), json!(if o.ok { "ok" } else { "failure" }));
                m.insert("result".into(), o.result.clone());
                m.insert("certificate".into(), o.certificate.clone());
            }
            Err(f) => {
                m.insert("status".into(), json!("error"));
                m.insert("error".into(), f.to_json());
            }
        }
        if let Some(s) = self.seconds {
            m.insert("timing".into(), json!({ "seconds": s }));
        }
        Value::Object(m)
    }

    /// One `path: value` line per leaf; arrays print inline.
    pub fn to_text(&self) -> String {
        fn walk(out: &mut String, path: &str, v: &Value) {
            match v {
                Value::Object(m) if !m.is_empty() => {
                    for (k, x) in m {
                        let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                        walk(out, &p, x);
                    }
                }
                Value::String(s) => writeln!(out, "{path}: {s}").unwrap(),
                _ => writeln!(out, "{path}: {v}").unwrap(),
            }
        }
        let mut out = String::new();
        walk(&mut out, "", &self.to_json());
        out
    }
}
