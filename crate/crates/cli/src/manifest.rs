use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command_line: String,
    pub config_digest: String,
    pub timestamp: String,
    /// The fully resolved configuration the digest was taken over.
    pub config: serde_json::Value,
}

impl RunManifest {
    pub fn new(config: serde_json::Value) -> Self {
        Self {
            tool_version: format!("casimir {}", env!("CARGO_PKG_VERSION")),
            command_line: std::env::args().collect::<Vec<_>>().join(" "),
            config_digest: digest(&config),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            config,
        }
    }

    pub fn emit(&self) {
        eprintln!("{}", serde_json::to_string(self).expect("manifest serialises"));
    }
}

/// SHA-256 of the compact JSON text.
pub fn digest(config: &serde_json::Value) -> String {
    let text = serde_json::to_string(config).expect("config serialises");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// SHA-256 of a file's bytes.
pub fn file_digest(path: &std::path::Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_tracks_content() {
        let a = json!({"x": 1.0, "y": "gold_drude"});
        assert_eq!(digest(&a), digest(&a.clone()));
        assert_ne!(digest(&a), digest(&json!({"x": 2.0, "y": "gold_drude"})));
        assert_eq!(digest(&a).len(), 64);
    }
}
