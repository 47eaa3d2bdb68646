use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Machine-readable record of one invocation. `timing_ms` is the only
/// field that varies between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub input_digest: String,
    pub payload: Value,
    pub warnings: Vec<String>,
    pub timing_ms: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// The report with the timing field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> RunReport {
        RunReport { timing_ms: 0.0, ..self.clone() }
    }
}

/// `sha256:<hex>` over the inputs, separated by NUL bytes.
pub fn digest(inputs: &[&str]) -> String {
    let mut h = Sha256::new();
    for (i, text) in inputs.iter().enumerate() {
        if i > 0 {
            h.update([0u8]);
        }
        h.update(text.as_bytes());
    }
    format!("sha256:{}", hex::encode(h.finalize()))
}
