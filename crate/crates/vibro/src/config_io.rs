//! TOML model files.
//!
//! The file mirrors [`ModelConfig`] key for key; see `docs/config.md` for
//! the schema. Unknown keys are rejected.

use std::path::Path;

use sha2::{Digest, Sha256};
use vibro_core::config::ModelConfig;

use crate::error::{Result, RunError};

#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: ModelConfig,
    /// SHA-256 of the file bytes, lower-case hex
    pub hash: String,
}

/// Parses and validates a model description.
pub fn parse_config(text: &str) -> Result<ModelConfig> {
    let cfg: ModelConfig = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
    cfg.validate().map_err(|e| RunError::Config(e.to_string()))?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let bytes = std::fs::read(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    Ok(LoadedConfig { config: parse_config(text)?, hash: sha256_hex(&bytes) })
}

pub fn to_toml(cfg: &ModelConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| RunError::Config(e.to_string()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}
