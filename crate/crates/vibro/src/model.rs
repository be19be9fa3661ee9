//! Configuration to assembled systems, and the sweep drivers on top.

use rayon::prelude::*;
use vibro_core::assembly::BlockSystem;
use vibro_core::config::{frequency_grid, GridPoint, ModelConfig, SolverMethod};
use vibro_core::mesh::{build_schedule, DofCount, Discretisation, MeshSchedule};
use vibro_core::solvers::{
    frequency_sweep, Clock, GmresSettings, IterativeSettings, SolverChoice, SweepOptions, SweepResult,
};

use crate::error::Result;

/// A validated configuration with its mesh schedule and the block system
/// of every mesh level.
pub struct Model {
    pub config: ModelConfig,
    pub schedule: MeshSchedule,
    pub discretisations: Vec<Discretisation>,
    pub systems: Vec<BlockSystem>,
}

impl Model {
    pub fn build(config: ModelConfig) -> Result<Self> {
        config.validate()?;
        let schedule = build_schedule(&config)?;
        let mut discretisations = Vec::new();
        let mut systems = Vec::new();
        for level in 0..config.level_count() {
            let disc = Discretisation::build(&config, level)?;
            systems.push(BlockSystem::build(&config, &disc)?);
            discretisations.push(disc);
        }
        Ok(Self { config, schedule, discretisations, systems })
    }

    pub fn grid(&self) -> Vec<GridPoint> {
        frequency_grid(&self.config.frequency)
    }

    pub fn dof_counts(&self) -> Vec<DofCount> {
        self.discretisations.iter().map(|d| d.dof_count()).collect()
    }

    /// System serving frequency `f`.
    pub fn system_at(&self, f: f64) -> (usize, &BlockSystem) {
        let level = self.schedule.band_level[self.config.frequency.band_of(f)];
        (level, &self.systems[level])
    }
}

/// Solver choice described by the `[solver]` section.
pub fn solver_choice(cfg: &ModelConfig) -> Result<SolverChoice> {
    let s = &cfg.solver;
    Ok(match s.method {
        SolverMethod::Direct => SolverChoice::Direct,
        method => SolverChoice::Iterative(IterativeSettings {
            method,
            groups: cfg.groups()?,
            overlap: if method == SolverMethod::Bjacobi { 0 } else { s.overlap },
            variant: s.variant,
            gmres: GmresSettings { atol: s.atol, rtol: s.rtol, max_it: s.max_it, restart: s.restart },
            diagonal_scale: s.diagonal_scale,
            warm_start: s.warm_start,
        }),
    })
}

/// `count` grid points spread evenly over the grid, ends included.
pub fn sampled_points(grid: &[GridPoint], count: usize) -> Vec<GridPoint> {
    if count == 0 || grid.is_empty() {
        return Vec::new();
    }
    if count == 1 || grid.len() <= count {
        return grid.iter().take(count.max(1)).copied().collect();
    }
    (0..count).map(|k| grid[k * (grid.len() - 1) / (count - 1)]).collect()
}

/// Splits the grid into independently solvable runs: one per band when
/// warm starts chain the frequencies, otherwise up to `threads` pieces
/// per band.
fn chunks(grid: &[GridPoint], chained: bool, threads: usize) -> Vec<&[GridPoint]> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < grid.len() {
        let band = grid[start].band;
        let end = start + grid[start..].iter().take_while(|p| p.band == band).count();
        let run = &grid[start..end];
        if chained || threads <= 1 {
            out.push(run);
        } else {
            let size = run.len().div_ceil(threads);
            out.extend(run.chunks(size));
        }
        start = end;
    }
    out
}

/// Frequency sweep over `grid` on `threads` workers. The records come back
/// in grid order and do not depend on the number of threads.
pub fn sweep(
    model: &Model,
    grid: &[GridPoint],
    choice: &SolverChoice,
    options: &SweepOptions,
    threads: usize,
    clock: &(dyn Clock + Sync),
) -> Result<SweepResult> {
    let chained = matches!(choice, SolverChoice::Iterative(it) if it.warm_start);
    let pieces = chunks(grid, chained, threads);
    let run = |g: &[GridPoint]| {
        frequency_sweep(&model.systems, &model.schedule.band_level, g, choice, options, clock)
    };
    let parts: Vec<vibro_core::Result<SweepResult>> = if threads <= 1 {
        pieces.into_iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| pieces.into_par_iter().map(run).collect())
    };
    let mut out = SweepResult::default();
    for p in parts {
        out.records.extend(p?.records);
    }
    Ok(out)
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(bands: &[usize]) -> Vec<GridPoint> {
        bands.iter().enumerate().map(|(k, &b)| GridPoint { index: k, f: 10.0 + k as f64, band: b }).collect()
    }

    #[test]
    fn chunks_respect_bands() {
        let g = grid(&[0, 0, 0, 0, 0, 1, 1, 2]);
        let c = chunks(&g, true, 4);
        assert_eq!(c.iter().map(|c| c.len()).collect::<Vec<_>>(), vec![5, 2, 1]);
        let c = chunks(&g, false, 2);
        assert_eq!(c.iter().map(|c| c.len()).collect::<Vec<_>>(), vec![3, 2, 1, 1, 1]);
        assert!(c.iter().all(|c| c.iter().all(|p| p.band == c[0].band)));
    }

    #[test]
    fn sampling_spreads_over_the_grid() {
        let g = grid(&[0; 496]);
        let s = sampled_points(&g, 10);
        assert_eq!(s.len(), 10);
        assert_eq!(s[0].index, 0);
        assert_eq!(s[9].index, 495);
        assert!(s.windows(2).all(|w| w[0].index < w[1].index));
        assert_eq!(sampled_points(&g[..3], 10).len(), 3);
    }
}
