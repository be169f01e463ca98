//! Reports: pretty-printed JSON whose first key is a versioned schema tag,
//! followed by the run manifest and the result.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::formats::FormatError;

pub const REPORT_SCHEMA: &str = "rigor-report/1";

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// JSON value of a binary64; non-finite values become strings. Finite values
/// print as the shortest decimal that reads back to the same double.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|&x| num(x)).collect())
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub subcommand: String,
    /// `(path, sha256)` of every input file.
    pub inputs: Vec<(String, String)>,
    pub config: Value,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_ms: f64,
}

impl Manifest {
    fn to_json(&self) -> Value {
        let inputs: Vec<Value> = self.inputs.iter().map(|(p, d)| json!({"path": p, "sha256": d})).collect();
        json!({
            "subcommand": self.subcommand,
            "version": env!("CARGO_PKG_VERSION"),
            "inputs": inputs,
            "config": self.config,
            "seed": self.seed,
            "threads": self.threads,
            "wall_time_ms": num(self.wall_time_ms),
        })
    }
}

pub fn render(manifest: &Manifest, result: Value) -> String {
    let mut top = Map::new();
    top.insert("schema".into(), json!(REPORT_SCHEMA));
    top.insert("manifest".into(), manifest.to_json());
    top.insert("result".into(), result);
    let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_report(text: &str) -> Result<Value, FormatError> {
    let v: Value = serde_json::from_str(text).map_err(|e| FormatError {
        line: e.line(),
        message: e.to_string(),
    })?;
    match v.get("schema").and_then(Value::as_str) {
        Some(REPORT_SCHEMA) => {}
        other => {
            return Err(FormatError {
                line: 0,
                message: format!("unsupported report schema {other:?}"),
            })
        }
    }
    if v.get("manifest").is_none() || v.get("result").is_none() {
        return Err(FormatError {
            line: 0,
            message: "report lacks manifest or result".into(),
        });
    }
    Ok(v)
}

/// The report with its wall-time field removed, re-rendered; equal for
/// reruns with identical inputs.
pub fn without_wall_time(text: &str) -> Result<String, FormatError> {
    let mut v = parse_report(text)?;
    if let Some(m) = v.get_mut("manifest").and_then(Value::as_object_mut) {
        m.shift_remove("wall_time_ms");
    }
    Ok(serde_json::to_string_pretty(&v).expect("serializable"))
}
