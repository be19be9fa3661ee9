use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::direct::DirectSolver;
use super::gmres::{gmres, GmresSettings, Preconditioner};
use super::precond::{BlockJacobi, SchwarzLayout};
use super::{Clock, SolveStats};
use crate::assembly::BlockSystem;
use crate::config::{GridPoint, SchwarzVariant, SolverMethod};
use crate::error::{Error, Result};
use crate::math::{norm2, C64};
use crate::sparse::CsrMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct IterativeSettings {
    pub method: SolverMethod,
    /// subdomains as lists of domain indices
    pub groups: Vec<Vec<usize>>,
    pub overlap: usize,
    pub variant: SchwarzVariant,
    pub gmres: GmresSettings,
    pub diagonal_scale: bool,
    pub warm_start: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolverChoice {
    Direct,
    Iterative(IterativeSettings),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepOptions {
    /// keep full solution vectors in the records
    pub keep_solutions: bool,
    /// also solve directly and record the relative SPL error
    pub verify: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyRecord {
    pub f: f64,
    pub band: usize,
    pub level: usize,
    pub spl: f64,
    pub probe: C64,
    pub stats: SolveStats,
    pub solution: Option<Vec<C64>>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub records: Vec<FrequencyRecord>,
}

impl SweepResult {
    pub fn max_relative_error(&self) -> Option<f64> {
        self.records.iter().filter_map(|r| r.stats.relative_error).fold(None, |m, e| Some(m.map_or(e, |m: f64| m.max(e))))
    }

    pub fn total_iterations(&self) -> usize {
        self.records.iter().map(|r| r.stats.iterations).sum()
    }
}

/// Global DoFs of each group of domains, sorted.
pub fn group_dofs(sys: &BlockSystem, groups: &[Vec<usize>]) -> Vec<Vec<usize>> {
    groups
        .iter()
        .map(|g| {
            let mut v: Vec<usize> = g.iter().flat_map(|&d| sys.blocks[d].0..sys.blocks[d].1).collect();
            v.sort_unstable();
            v
        })
        .collect()
}

/// `S A S` with `S = diag(1 / sqrt|a_ii|)`.
fn diagonal_scaling(a: &CsrMatrix<C64>) -> (CsrMatrix<C64>, Vec<f64>) {
    let n = a.nrows();
    let s: Vec<f64> = (0..n)
        .map(|i| {
            let d = a.get(i, i).norm();
            if d > 0.0 {
                1.0 / crate::math::sqrt(d)
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = a.clone();
    let ptr = a.row_ptr().to_vec();
    let idx = a.col_idx().to_vec();
    let vals = scaled.values_mut();
    for i in 0..n {
        for k in ptr[i]..ptr[i + 1] {
            vals[k] *= s[i] * s[idx[k]];
        }
    }
    (scaled, s)
}

enum Prepared {
    Direct(DirectSolver),
    Schwarz(SchwarzLayout),
    Jacobi(Vec<Vec<usize>>),
}

/// Solves the systems at the given grid points band by band. `systems[l]`
/// is the block system of mesh level `l`; `band_level[b]` selects the level
/// of band `b`. Symbolic analyses are done once per level; iterative solves
/// warm-start from the previous frequency of the same band.
pub fn frequency_sweep(
    systems: &[BlockSystem],
    band_level: &[usize],
    grid: &[GridPoint],
    choice: &SolverChoice,
    options: &SweepOptions,
    clock: &dyn Clock,
) -> Result<SweepResult> {
    let mut prepared: BTreeMap<usize, Prepared> = BTreeMap::new();
    let mut reference: BTreeMap<usize, DirectSolver> = BTreeMap::new();
    let mut records = Vec::with_capacity(grid.len());
    let mut previous: Option<(usize, Vec<C64>)> = None;

    for p in grid {
        let level = band_level[p.band];
        let sys = &systems[level];
        let f = p.f;
        let a = sys.operator(f)?;
        let b = sys.load_vector(f);
        if !prepared.contains_key(&level) {
            let pattern = sys.pattern();
            let prep = match choice {
                SolverChoice::Direct => Prepared::Direct(DirectSolver::analyze(&pattern)?),
                SolverChoice::Iterative(it) => {
                    let groups = group_dofs(sys, &it.groups);
                    match it.method {
                        SolverMethod::Gasm => {
                            Prepared::Schwarz(SchwarzLayout::new(&pattern, &groups, it.overlap, it.variant)?)
                        }
                        SolverMethod::Bjacobi => Prepared::Jacobi(groups),
                        SolverMethod::Direct => Prepared::Direct(DirectSolver::analyze(&pattern)?),
                    }
                }
            };
            prepared.insert(level, prep);
        }
        let (x, mut stats) = match (&prepared[&level], choice) {
            (Prepared::Direct(ds), _) => ds.solve(&a, &b, clock).map_err(|e| e.at(f))?,
            (prep, SolverChoice::Iterative(it)) => {
                let warm = match (&previous, it.warm_start) {
                    (Some((band, x)), true) if *band == p.band => Some(x.as_slice()),
                    _ => None,
                };
                solve_iterative(&a, &b, prep, it, warm, clock).map_err(|e| e.at(f))?
            }
            (_, SolverChoice::Direct) => unreachable!(),
        };
        if options.verify {
            if !reference.contains_key(&level) {
                reference.insert(level, DirectSolver::analyze(&sys.pattern())?);
            }
            let (xr, _) = reference[&level].solve(&a, &b, clock).map_err(|e| e.at(f))?;
            let spl_ref = sys.spl(&xr);
            stats.relative_error = Some(((sys.spl(&x) - spl_ref) / spl_ref).abs());
        }
        records.push(FrequencyRecord {
            f,
            band: p.band,
            level,
            spl: sys.spl(&x),
            probe: x[sys.probe_dof],
            stats,
            solution: if options.keep_solutions { Some(x.clone()) } else { None },
        });
        previous = Some((p.band, x));
    }
    Ok(SweepResult { records })
}

fn solve_iterative(
    a: &CsrMatrix<C64>,
    b: &[C64],
    prep: &Prepared,
    it: &IterativeSettings,
    warm: Option<&[C64]>,
    clock: &dyn Clock,
) -> Result<(Vec<C64>, SolveStats)> {
    let t0 = clock.now();
    let (op, s) = if it.diagonal_scale {
        diagonal_scaling(a)
    } else {
        (a.clone(), vec![1.0; a.nrows()])
    };
    // GMRES sees the scaled system with a unit right-hand side, so the
    // absolute tolerance does not depend on the load amplitude or units
    let mut rhs: Vec<C64> = b.iter().zip(&s).map(|(v, si)| v * si).collect();
    let bs = norm2(&rhs);
    if bs == 0.0 {
        return Ok((vec![C64::zero(); b.len()], SolveStats { converged: true, ..Default::default() }));
    }
    for v in rhs.iter_mut() {
        *v /= bs;
    }
    let (pc, memory): (Box<dyn Preconditioner>, usize) = match prep {
        Prepared::Schwarz(layout) => {
            let p = layout.factor(&op)?;
            let m = p.factor_memory();
            (Box::new(p), m)
        }
        Prepared::Jacobi(groups) => {
            let p = BlockJacobi::new(&op, groups)?;
            let m = p.factor_memory();
            (Box::new(p), m)
        }
        Prepared::Direct(_) => return Err(Error::Validation("direct solver in iterative path".into())),
    };
    let t1 = clock.now();
    // warm start, unless the previous solution is a worse guess than zero
    let x0: Option<Vec<C64>> = warm.and_then(|xp| {
        let y: Vec<C64> = xp.iter().zip(&s).map(|(v, si)| v / (si * bs)).collect();
        if norm2(&op.residual(&y, &rhs)) < 1.0 {
            Some(y)
        } else {
            None
        }
    });
    let out = gmres(&op, pc.as_ref(), &rhs, x0.as_deref(), &it.gmres);
    let x: Vec<C64> = out.x.iter().zip(&s).map(|(v, si)| v * (si * bs)).collect();
    let t2 = clock.now();
    let bn = norm2(b);
    let r = norm2(&a.residual(&x, b));
    Ok((
        x,
        SolveStats {
            iterations: out.iterations,
            residual_history: out.residual_history,
            converged: out.converged,
            true_residual: if bn > 0.0 { r / bn } else { r },
            factor_time: t1 - t0,
            solve_time: t2 - t1,
            factor_memory: memory,
            relative_error: None,
        },
    ))
}
