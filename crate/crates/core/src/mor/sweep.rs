use alloc::vec::Vec;

use super::reduced::ReducedModel;
use super::{in_window, relative_error};
use crate::error::{Error, Result};
use crate::math::{self, C64};
use crate::solvers::Clock;

#[derive(Clone, Debug, PartialEq)]
pub struct RomRecord {
    pub f: f64,
    /// index of the evaluating model
    pub window: usize,
    pub spl: f64,
    pub probe: C64,
    pub outputs: Vec<C64>,
    /// assembly and dense solve time, s
    pub solve_time: f64,
}

/// A frequency on the edge shared by two windows, evaluated by both.
#[derive(Clone, Debug, PartialEq)]
pub struct Seam {
    pub f: f64,
    pub lower: usize,
    pub upper: usize,
    /// `‖y_lo − y_hi‖ / ‖y_lo‖` on a shared mesh; across mesh levels the
    /// outputs differ in length and the relative difference of the mean
    /// squared pressure is used instead
    pub discrepancy: f64,
    pub cross_level: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RomSweep {
    pub records: Vec<RomRecord>,
    pub seams: Vec<Seam>,
}

/// Evaluates each frequency with the first model whose window contains it,
/// so a shared edge belongs to the lower window.
pub fn rom_sweep(roms: &[ReducedModel], freqs: &[f64], clock: &dyn Clock) -> Result<RomSweep> {
    let mut out = RomSweep::default();
    for &f in freqs {
        let k = roms.iter().position(|r| in_window(f, r.window)).ok_or(Error::OutsideWindows(f))?;
        let t0 = clock.now();
        let (y, probe) = roms[k].evaluate(f)?;
        let t1 = clock.now();
        if let Some(u) = roms.iter().skip(k + 1).position(|r| in_window(f, r.window)).map(|i| i + k + 1) {
            let (yu, _) = roms[u].evaluate(f)?;
            let cross_level = roms[u].level != roms[k].level || yu.len() != y.len();
            let discrepancy = if cross_level {
                let ms = |v: &[C64]| v.iter().map(|p| p.norm_sqr()).sum::<f64>() / v.len().max(1) as f64;
                let (a, b) = (ms(&y), ms(&yu));
                (a - b).abs() / a
            } else {
                relative_error(&y, &yu).value
            };
            out.seams.push(Seam { f, lower: k, upper: u, discrepancy, cross_level });
        }
        out.records.push(RomRecord { f, window: k, spl: math::spl(&y), probe, outputs: y, solve_time: t1 - t0 });
    }
    Ok(out)
}
