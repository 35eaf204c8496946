use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance attached to every emitted result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub tool_version: String,
    pub timestamp_unix: u64,
    pub seeds: Vec<u64>,
    pub precision_digits: u32,
    /// SHA-256 of the canonical JSON of the result payload.
    pub result_digest: String,
}

impl RunManifest {
    pub fn new(command: &str, precision_digits: u32) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            tool_version: TOOL_VERSION.to_string(),
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            seeds: Vec::new(),
            precision_digits,
            result_digest: String::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seeds.push(seed);
        self
    }

    pub fn seal(mut self, payload: &Value) -> Self {
        self.result_digest = digest(payload);
        self
    }

    /// `# key: value` lines for text and CSV output.
    pub fn comment_lines(&self) -> String {
        let params = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ");
        let mut out = format!(
            "# zetaforge {} {}: {}\n# digits: {}  timestamp: {}\n",
            self.tool_version, self.command, params, self.precision_digits, self.timestamp_unix
        );
        if !self.seeds.is_empty() {
            out.push_str(&format!("# seeds: {:?}\n", self.seeds));
        }
        out.push_str(&format!("# sha256: {}\n", self.result_digest));
        out
    }
}

pub fn digest(payload: &Value) -> String {
    let bytes = serde_json::to_vec(payload).expect("json value serializes");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `{"manifest": ..., ...payload}` as pretty JSON.
pub fn document(manifest: &RunManifest, payload: Value) -> Value {
    let mut doc = serde_json::Map::new();
    doc.insert("manifest".into(), serde_json::to_value(manifest).expect("manifest serializes"));
    if let Value::Object(fields) = payload {
        doc.extend(fields);
    } else {
        doc.insert("result".into(), payload);
    }
    Value::Object(doc)
}
