//! Run manifest: resolved config echo, tool version, tolerances, wall
//! time, and SHA-256 digests of every output file. Written only after all
//! outputs landed on disk.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceSet {
    pub quad_rel_tol: f64,
    pub quad_abs_tol: f64,
    pub quad_max_subdivisions: usize,
    pub root_x_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool_version: String,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub tolerances: ToleranceSet,
    pub wall_time_ms: f64,
    pub outputs: Vec<OutputDigest>,
}

impl Manifest {
    pub fn new(command: &str, cfg: &RunConfig, wall_time_ms: f64) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: cfg.entries().into_iter().collect(),
            tolerances: ToleranceSet {
                quad_rel_tol: cfg.quad_rel_tol,
                quad_abs_tol: cfg.quad_abs_tol,
                quad_max_subdivisions: cfg.quad_max_subdivisions,
                root_x_tol: cfg.root_x_tol,
            },
            wall_time_ms,
            outputs: Vec::new(),
        }
    }

    /// Records a written output file; digests are computed from the bytes
    /// that actually landed on disk.
    pub fn record_output(&mut self, path: &Path) -> std::io::Result<()> {
        let bytes = std::fs::read(path)?;
        let digest = Sha256::digest(&bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.outputs.push(OutputDigest {
            file: path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            sha256: hex,
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("manifest fields are serializable");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_digests_written_files() {
        let dir = std::env::temp_dir().join(format!("hybridlink-manifest-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let file = dir.join("data.csv");
        std::fs::write(&file, b"a,b\n1,2\n").unwrap();

        let cfg = RunConfig::default();
        let mut manifest = Manifest::new("fig5", &cfg, 42.0);
        manifest.record_output(&file).unwrap();
        assert_eq!(manifest.outputs.len(), 1);
        assert_eq!(manifest.outputs[0].bytes, 8);
        assert_eq!(manifest.outputs[0].file, "data.csv");
        // sha256 of "a,b\n1,2\n"
        assert_eq!(manifest.outputs[0].sha256.len(), 64);

        let json = manifest.to_json();
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(doc["command"], "fig5");
        assert_eq!(doc["config"]["g_ghz"], "16");
        assert!(doc["wall_time_ms"].is_number());

        std::fs::remove_dir_all(&dir).unwrap();
    }
}
