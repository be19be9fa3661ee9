use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vibro_core::config::SolverSettings;

use crate::error::{Result, RunError};
use crate::model::Model;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandSummary {
    pub band: usize,
    pub f_lo: f64,
    pub f_hi: f64,
    pub level: usize,
    pub dofs: Vec<usize>,
    pub dofs_total: usize,
}

/// What a command ran and what it wrote.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub threads: usize,
    pub solver: SolverSettings,
    pub bands: Vec<BandSummary>,
    pub outputs: Vec<PathBuf>,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn new(command: &str, model: &Model, config_hash: &str, seed: u64, threads: usize) -> Self {
        let cfg = &model.config;
        let counts = model.dof_counts();
        let bands = (0..cfg.frequency.bands())
            .map(|b| {
                let (f_lo, f_hi) = cfg.frequency.band_range(b);
                let level = model.schedule.band_level[b];
                BandSummary {
                    band: b,
                    f_lo,
                    f_hi,
                    level,
                    dofs: counts[level].per_domain.clone(),
                    dofs_total: counts[level].total,
                }
            })
            .collect();
        Self {
            command: command.into(),
            config_hash: config_hash.into(),
            seed,
            threads,
            solver: cfg.solver.clone(),
            bands,
            outputs: Vec::new(),
            wall_time_s: 0.0,
        }
    }

    /// Writes the manifest after checking that every listed output exists.
    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(missing) = self.outputs.iter().find(|p| !p.exists()) {
            return Err(RunError::io(missing, std::io::Error::new(std::io::ErrorKind::NotFound, "listed output missing")));
        }
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| RunError::io(path, e))
    }
}

/// One row of the comparison report, written by every solving command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub method: String,
    pub frequencies: usize,
    pub total_time_s: f64,
    /// mean time per frequency of the solve itself, s
    pub solve_time_per_f_s: f64,
    pub memory_bytes: usize,
    pub max_relative_error: Option<f64>,
}

pub fn write_summary(dir: &Path, s: &RunSummary) -> Result<PathBuf> {
    let path = dir.join(format!("summary_{}.json", s.method));
    std::fs::write(&path, serde_json::to_string_pretty(s)?).map_err(|e| RunError::io(&path, e))?;
    Ok(path)
}

/// All summaries in `dir`, sorted by method name.
pub fn read_summaries(dir: &Path) -> Result<Vec<RunSummary>> {
    let mut out = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|e| RunError::io(dir, e))?;
    for e in entries {
        let path = e.map_err(|e| RunError::io(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("summary_") && name.ends_with(".json") {
            let text = std::fs::read_to_string(&path).map_err(|e| RunError::io(&path, e))?;
            out.push(serde_json::from_str(&text)?);
        }
    }
    out.sort_by(|a: &RunSummary, b| a.method.cmp(&b.method));
    Ok(out)
}
