//! CSV artefacts: comma separated, `.` decimal point, one header row, LF
//! line ends. Floats use the shortest representation that round-trips, so
//! identical runs give identical files. Wall-clock times only ever appear
//! in the `*timings*.csv` files.

use std::path::Path;

use vibro_core::config::{GridPoint, ModelConfig};
use vibro_core::math::{self, C64};
use vibro_core::mesh::domain_wavelength;
use vibro_core::mor::{ReducedModel, RomSweep};
use vibro_core::solvers::SweepResult;

use crate::error::{Result, RunError};
use crate::model::Model;

pub fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => RunError::io(path, io),
            other => RunError::Config(format!("{}: {other:?}", path.display())),
        })?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush().map_err(|e| RunError::io(path, e))
}

fn s(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(s).unwrap_or_default()
}

/// Level of a complex pressure amplitude, dB re 20 µPa (rms).
pub fn pressure_db(p: C64) -> f64 {
    math::spl(&[p])
}

pub fn write_frf(path: &Path, sweep: &SweepResult) -> Result<()> {
    write_rows(
        path,
        &["f", "band", "level", "re_p", "im_p", "abs_db", "spl_db"],
        sweep.records.iter().map(|r| {
            vec![s(r.f), r.band.to_string(), r.level.to_string(), s(r.probe.re), s(r.probe.im), s(pressure_db(r.probe)), s(r.spl)]
        }),
    )
}

pub fn write_stats(path: &Path, sweep: &SweepResult) -> Result<()> {
    write_rows(
        path,
        &["f", "iterations", "converged", "true_residual", "factor_memory_bytes", "relative_error"],
        sweep.records.iter().map(|r| {
            vec![
                s(r.f),
                r.stats.iterations.to_string(),
                r.stats.converged.to_string(),
                s(r.stats.true_residual),
                r.stats.factor_memory.to_string(),
                opt(r.stats.relative_error),
            ]
        }),
    )
}

pub fn write_timings(path: &Path, sweep: &SweepResult) -> Result<()> {
    write_rows(
        path,
        &["f", "factor_time_s", "solve_time_s"],
        sweep.records.iter().map(|r| vec![s(r.f), s(r.stats.factor_time), s(r.stats.solve_time)]),
    )
}

/// One row per band: its range, serving level, element sizes and DoFs.
pub fn write_schedule(path: &Path, model: &Model) -> Result<()> {
    let cfg = &model.config;
    let counts = model.dof_counts();
    let mut header: Vec<String> = ["band", "f_lo", "f_max", "level", "f_switch"].iter().map(|h| h.to_string()).collect();
    for d in &cfg.domains {
        header.push(format!("h_{}", d.id));
    }
    for d in &cfg.domains {
        header.push(format!("dofs_{}", d.id));
    }
    header.push("dofs_total".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..cfg.frequency.bands()).map(|b| {
        let (lo, hi) = cfg.frequency.band_range(b);
        let l = model.schedule.band_level[b];
        let mut row = vec![b.to_string(), s(lo), s(hi), l.to_string(), opt(model.schedule.f_switch[l])];
        for [hx, hy] in &model.schedule.levels[l] {
            row.push(s(hx.max(*hy)));
        }
        for n in &counts[l].per_domain {
            row.push(n.to_string());
        }
        row.push(counts[l].total.to_string());
        row
    });
    write_rows(path, &header, rows)
}

/// Wavelength of every domain over the grid, m.
pub fn write_wavelengths(path: &Path, cfg: &ModelConfig, grid: &[GridPoint]) -> Result<()> {
    let mut header = vec!["f".to_string()];
    header.extend(cfg.domains.iter().map(|d| d.id.clone()));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut rows = Vec::with_capacity(grid.len());
    for p in grid {
        let mut row = vec![s(p.f)];
        for d in 0..cfg.domains.len() {
            row.push(s(domain_wavelength(cfg, d, p.f)?));
        }
        rows.push(row);
    }
    write_rows(path, &header, rows)
}

/// Direct against iterative SPL at the verified frequencies.
pub fn write_solver_errors(path: &Path, reference: &SweepResult, checked: &SweepResult) -> Result<()> {
    write_rows(
        path,
        &["f", "spl_direct_db", "spl_iterative_db", "relative_error", "iterations", "converged"],
        reference.records.iter().zip(&checked.records).map(|(r, c)| {
            vec![
                s(r.f),
                s(r.spl),
                s(c.spl),
                s(((c.spl - r.spl) / r.spl).abs()),
                c.stats.iterations.to_string(),
                c.stats.converged.to_string(),
            ]
        }),
    )
}

pub fn write_rom_frf(path: &Path, sweep: &RomSweep) -> Result<()> {
    write_rows(
        path,
        &["f", "window", "re_p", "im_p", "abs_db", "spl_db"],
        sweep.records.iter().map(|r| {
            vec![s(r.f), r.window.to_string(), s(r.probe.re), s(r.probe.im), s(pressure_db(r.probe)), s(r.spl)]
        }),
    )
}

pub fn write_rom_timings(path: &Path, sweep: &RomSweep) -> Result<()> {
    write_rows(path, &["f", "window", "solve_time_s"], sweep.records.iter().map(|r| vec![s(r.f), r.window.to_string(), s(r.solve_time)]))
}

pub fn write_seams(path: &Path, sweep: &RomSweep) -> Result<()> {
    write_rows(
        path,
        &["f", "lower", "upper", "discrepancy", "cross_level"],
        sweep.seams.iter().map(|m| {
            vec![s(m.f), m.lower.to_string(), m.upper.to_string(), s(m.discrepancy), m.cross_level.to_string()]
        }),
    )
}

pub fn write_rom_windows(path: &Path, roms: &[ReducedModel]) -> Result<()> {
    write_rows(
        path,
        &["window", "f_lo", "f_hi", "level", "n", "r", "expansion_points", "converged", "candidate_error_max"],
        roms.iter().enumerate().map(|(k, r)| {
            let emax = r.error_log.iter().map(|e| e.error).fold(0.0, f64::max);
            vec![
                k.to_string(),
                s(r.window[0]),
                s(r.window[1]),
                r.level.to_string(),
                r.n.to_string(),
                r.dim().to_string(),
                r.expansion_points.len().to_string(),
                r.converged.to_string(),
                s(emax),
            ]
        }),
    )
}

/// FOM against ROM output error at given frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct RomErrorRow {
    pub f: f64,
    pub window: usize,
    pub error: f64,
    pub spl_fom: f64,
    pub spl_rom: f64,
}

pub fn write_rom_errors(path: &Path, rows: &[RomErrorRow]) -> Result<()> {
    write_rows(
        path,
        &["f", "window", "relative_error", "spl_fom_db", "spl_rom_db"],
        rows.iter().map(|r| vec![s(r.f), r.window.to_string(), s(r.error), s(r.spl_fom), s(r.spl_rom)]),
    )
}
