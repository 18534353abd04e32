//! Run manifest: hashes of the config and every input file, the seed, tool
//! version, and wall-clock metadata. Enough to reproduce a run exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub tool_version: String,
    pub seed: u64,
    pub config_sha256: String,
    pub input_sha256: Vec<(String, String)>,
    /// Wall-clock metadata; excluded from determinism comparisons.
    pub created_at: String,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| SimError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn build(config_path: &Path, input_paths: &[&Path], seed: u64) -> Result<Self> {
        let input_sha256 = input_paths
            .iter()
            .map(|p| Ok((p.display().to_string(), sha256_file(p)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config_sha256: sha256_file(config_path)?,
            input_sha256,
            created_at: chrono::Utc::now().to_rfc3339(),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json =
            serde_json::to_string_pretty(self).map_err(|e| SimError::validation(e.to_string()))?;
        fs::write(path, json + "\n").map_err(|e| SimError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }
}
