use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

/// Provenance written into every output artifact.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, flags: BTreeMap<String, String>, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            flags,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    /// `# key: value` lines for a CSV preamble, timestamp last.
    pub fn comment_lines(&self) -> Vec<String> {
        let flags = serde_json::to_string(&self.flags).expect("string map serializes");
        let seed = self.seed.map_or("none".to_string(), |s| s.to_string());
        vec![
            format!("# command: {}", self.command),
            format!("# flags: {flags}"),
            format!("# seed: {seed}"),
            format!("# version: {}", self.version),
            format!("# timestamp: {}", self.timestamp),
        ]
    }
}

/// Builds the flag map from `(name, value)` pairs, dropping unset flags.
pub fn flags<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs
        .into_iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}
