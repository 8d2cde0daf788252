use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Provenance block embedded in every output. Two runs with equal manifests, timestamps
/// aside, produce byte-identical files.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub tol: f64,
    pub version: &'static str,
    /// `SOURCE_DATE_EPOCH` when set, otherwise the wall clock in Unix seconds.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, k: Option<usize>, tol: f64) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or_else(|| std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0));
        RunManifest { command: command.into(), inputs: BTreeMap::new(), k, tol, version: env!("CARGO_PKG_VERSION"), timestamp }
    }

    pub fn record(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.insert(path.display().to_string(), hex::encode(Sha256::digest(bytes)));
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("manifest serializes")
    }
}
