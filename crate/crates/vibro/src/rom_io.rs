//! Reduced models as JSON.
//!
//! The file holds the format version, each window's reduced term matrices
//! with their frequency coefficients, reduced load terms, output rows,
//! expansion points and error log. Bases are not stored, so a loaded model
//! evaluates outputs but cannot expand to the full state.

use std::path::Path;

use serde::{Deserialize, Serialize};
use vibro_core::mor::{ReducedModel, ROM_FORMAT_VERSION};

use crate::error::{Result, RunError};

#[derive(Serialize, Deserialize)]
struct RomFile {
    version: u32,
    config_hash: String,
    models: Vec<ReducedModel>,
}

pub fn save_roms(path: &Path, config_hash: &str, models: &[ReducedModel]) -> Result<()> {
    let file = RomFile { version: ROM_FORMAT_VERSION, config_hash: config_hash.into(), models: models.to_vec() };
    let text = serde_json::to_string(&file)?;
    std::fs::write(path, text).map_err(|e| RunError::io(path, e))
}

/// Loads models written by [`save_roms`]; with `config_hash` given, refuses
/// models built from a different configuration.
pub fn load_roms(path: &Path, config_hash: Option<&str>) -> Result<Vec<ReducedModel>> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
    let file: RomFile = serde_json::from_str(&text)?;
    if file.version != ROM_FORMAT_VERSION || file.models.iter().any(|m| m.version != ROM_FORMAT_VERSION) {
        return Err(RunError::Config(format!("{}: unsupported reduced-model version {}", path.display(), file.version)));
    }
    if let Some(h) = config_hash {
        if h != file.config_hash {
            return Err(RunError::Config(format!("{}: built from a different configuration", path.display())));
        }
    }
    Ok(file.models)
}
