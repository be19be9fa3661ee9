use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::fom::FullOrderModel;
use super::krylov::{krylov_block, BREAKDOWN_TOL};
use super::reduced::{ErrorSample, ReducedModel};
use super::{in_window, max_error, relative_error, validate_windows, WINDOW_TOL};
use crate::assembly::BlockSystem;
use crate::config::{frequency_grid, FrequencyPlan, GridPoint, MorSettings};
use crate::dense::orthogonalize;
use crate::error::{Error, Result};
use crate::math::C64;

/// Deepest bisection of an automatic window.
const MAX_SPLIT_DEPTH: usize = 6;

#[derive(Clone, Debug)]
pub struct GreedyOutcome {
    pub rom: ReducedModel,
    /// `ε_max` on the candidate grid after each expansion
    pub history: Vec<f64>,
    /// `ε_max` of the best basis so far, non-increasing
    pub best_history: Vec<f64>,
    /// stopped because the best error stopped improving
    pub stalled: bool,
    /// full solves spent on certification
    pub fom_solves: usize,
}

/// Greedy candidates in a window: every `stride`-th grid frequency plus
/// both window edges.
pub fn candidate_points(grid: &[GridPoint], window: [f64; 2], stride: usize) -> Vec<f64> {
    let stride = stride.max(1);
    let mut out = vec![window[0]];
    for p in grid {
        if p.index % stride == 0 && p.f > window[0] + WINDOW_TOL && p.f < window[1] - WINDOW_TOL {
            out.push(p.f);
        }
    }
    out.push(window[1]);
    out
}

/// Interior grid frequencies halfway between candidates; disjoint from
/// [`candidate_points`] for the same stride. Empty for `stride < 2`.
pub fn verification_points(grid: &[GridPoint], window: [f64; 2], stride: usize) -> Vec<f64> {
    if stride < 2 {
        return Vec::new();
    }
    grid.iter()
        .filter(|p| p.index % stride == stride / 2 && p.f > window[0] + WINDOW_TOL && p.f < window[1] - WINDOW_TOL)
        .map(|p| p.f)
        .collect()
}

/// `(f, ε(f))` of a reduced model against full solves.
pub fn verify_rom(fom: &FullOrderModel, rom: &ReducedModel, freqs: &[f64]) -> Result<Vec<(f64, f64)>> {
    freqs
        .iter()
        .map(|&f| {
            let y = fom.response(f)?;
            let e = match rom.response(f) {
                Ok(yr) => relative_error(&y, &yr).value,
                Err(_) => f64::INFINITY,
            };
            Ok((f, e))
        })
        .collect()
}

fn candidate_errors(rom: &ReducedModel, cands: &[f64], reference: &[Vec<C64>]) -> Vec<(f64, f64)> {
    cands
        .iter()
        .zip(reference)
        .map(|(&f, y)| {
            let e = match rom.response(f) {
                Ok(yr) => relative_error(y, &yr).value,
                Err(_) => f64::INFINITY,
            };
            (f, if e.is_nan() { f64::INFINITY } else { e })
        })
        .collect()
}

/// Greedy expansion-point selection on one window.
///
/// The first point is the window centre; each later point is the candidate
/// with the largest error among those not yet used. The loop ends when
/// `ε_max ≤ tol`, after `max_points` points, or (with `stop_on_stall`)
/// when the best `ε_max` improved by less than 10 % over three expansions.
/// The returned model is the best basis seen, which is a leading part of
/// the final one because the bases are nested.
pub fn greedy_expand(
    fom: &FullOrderModel,
    settings: &MorSettings,
    window: [f64; 2],
    candidates: &[f64],
    stop_on_stall: bool,
) -> Result<GreedyOutcome> {
    if candidates.is_empty() {
        return Err(Error::Validation("greedy candidate grid is empty".into()));
    }
    if candidates.iter().any(|&f| !in_window(f, window)) {
        return Err(Error::Validation("greedy candidates must lie inside the window".into()));
    }
    let reference: Vec<Vec<C64>> = candidates.iter().map(|&f| fom.response(f)).collect::<Result<_>>()?;
    let mut rom = ReducedModel::empty(fom.sys, window, fom.level);
    let mut used: Vec<f64> = Vec::new();
    let mut history = Vec::new();
    let mut best_history: Vec<f64> = Vec::new();
    // (dimension, number of points, errors) of the best basis
    let mut best: Option<(usize, usize, Vec<(f64, f64)>)> = None;
    let mut next = 0.5 * (window[0] + window[1]);
    let mut stalled = false;
    loop {
        let block = krylov_block(fom, next, settings.moments_per_point, settings.second_order)?;
        used.push(next);
        for mut v in block.vectors {
            if orthogonalize(&rom.basis, &mut v, BREAKDOWN_TOL).is_some() {
                rom.extend(fom.sys, v);
            }
        }
        let errs = candidate_errors(&rom, candidates, &reference);
        let (_, emax) = max_error(&errs).unwrap();
        history.push(emax);
        let improved = best.as_ref().map_or(true, |(_, _, e)| emax < max_error(e).unwrap().1);
        if improved {
            best = Some((rom.dim(), used.len(), errs.clone()));
        }
        let best_emax = max_error(&best.as_ref().unwrap().2).unwrap().1;
        best_history.push(best_emax);
        if best_emax <= settings.tol || used.len() >= settings.max_points {
            break;
        }
        let k = best_history.len();
        if stop_on_stall && k >= 4 && best_history[k - 1] > 0.9 * best_history[k - 4] {
            stalled = true;
            break;
        }
        let pick = errs
            .iter()
            .filter(|(f, _)| !used.iter().any(|u| (u - f).abs() <= WINDOW_TOL))
            .fold(None, |m: Option<(f64, f64)>, &(f, e)| match m {
                Some((_, me)) if me >= e => m,
                _ => Some((f, e)),
            });
        match pick {
            Some((f, _)) => next = f,
            None => break,
        }
    }
    let (r, npts, errs) = best.unwrap();
    rom.truncate(r);
    used.truncate(npts);
    rom.expansion_points = used;
    rom.converged = max_error(&errs).unwrap().1 <= settings.tol;
    rom.error_log = errs.into_iter().map(|(f, error)| ErrorSample { f, error }).collect();
    Ok(GreedyOutcome { rom, history, best_history, stalled, fom_solves: candidates.len() })
}

/// Mesh level of a window: the finest level among the bands it overlaps.
fn window_level(plan: &FrequencyPlan, band_level: &[usize], w: [f64; 2]) -> usize {
    (0..plan.bands())
        .filter(|&b| {
            let (lo, hi) = plan.band_range(b);
            lo < w[1] - WINDOW_TOL && hi > w[0] + WINDOW_TOL
        })
        .map(|b| band_level[b])
        .max()
        .unwrap_or(band_level[0])
}

/// Local reduced models covering the whole frequency plan.
///
/// With explicit windows each window gets one greedy model. Without them
/// every band starts as one window, and a window whose greedy run stalls or
/// exhausts its budget above tolerance is bisected at the grid frequency
/// nearest its centre and rebuilt, up to a fixed depth.
pub fn build_local_roms(
    systems: &[BlockSystem],
    band_level: &[usize],
    plan: &FrequencyPlan,
    settings: &MorSettings,
) -> Result<Vec<ReducedModel>> {
    let grid = frequency_grid(plan);
    let (windows, auto) = match &settings.windows {
        Some(w) => {
            validate_windows(w, plan.f_min, plan.f_max)?;
            (w.clone(), false)
        }
        None => ((0..plan.bands()).map(|b| {
            let (lo, hi) = plan.band_range(b);
            [lo, hi]
        }).collect(), true),
    };
    let mut foms: BTreeMap<usize, FullOrderModel> = BTreeMap::new();
    let mut out = Vec::new();
    // depth-first so the output stays ordered by frequency
    let mut stack: Vec<([f64; 2], usize)> = windows.iter().rev().map(|&w| (w, 0)).collect();
    while let Some((w, depth)) = stack.pop() {
        let level = window_level(plan, band_level, w);
        if !foms.contains_key(&level) {
            foms.insert(level, FullOrderModel::new(&systems[level], level)?);
        }
        let fom = &foms[&level];
        let cands = candidate_points(&grid, w, settings.candidate_stride);
        let outcome = greedy_expand(fom, settings, w, &cands, auto)?;
        if auto && !outcome.rom.converged && depth < MAX_SPLIT_DEPTH {
            let inner: Vec<f64> =
                grid.iter().map(|p| p.f).filter(|&f| f > w[0] + WINDOW_TOL && f < w[1] - WINDOW_TOL).collect();
            if inner.len() >= 2 * settings.candidate_stride.max(1) {
                let mid = 0.5 * (w[0] + w[1]);
                let split = inner.iter().copied().fold(inner[0], |b, f| if (f - mid).abs() < (b - mid).abs() { f } else { b });
                stack.push(([split, w[1]], depth + 1));
                stack.push(([w[0], split], depth + 1));
                continue;
            }
        }
        let mut rom = outcome.rom;
        rom.rayleigh = settings.rayleigh;
        out.push(rom);
    }
    Ok(out)
}
