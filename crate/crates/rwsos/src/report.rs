//! Machine-readable reports. Every command emits one JSON document with a
//! `schemaVersion` field to standard output (or to the `-o` file), and a
//! one-line human summary to standard error.

use std::path::Path;

use core_syntax::VarStore;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

pub fn document(command: &str, inputs: Value, outcome: Value) -> Value {
    json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "outcome": outcome,
    })
}

pub fn emit(doc: &Value, out: Option<&Path>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(doc).expect("reports are serializable");
    match out {
        Some(path) => std::fs::write(path, text + "\n"),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn summary(msg: &str) {
    eprintln!("{msg}");
}

/// A variable store as a JSON object, `{"x": 1}`.
pub fn store_json(s: &VarStore) -> Value {
    let mut m = Map::new();
    for (var, val) in s.iter() {
        m.insert(var.to_string(), json!(val));
    }
    Value::Object(m)
}

pub fn stores_json(ss: &[VarStore]) -> Value {
    Value::Array(ss.iter().map(store_json).collect())
}
