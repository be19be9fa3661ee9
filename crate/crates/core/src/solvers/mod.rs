//! Linear solvers for `A(ω) x = f`: sparse direct LU, right-preconditioned
//! GMRES with block-Jacobi and additive Schwarz preconditioners over
//! physical-domain groupings, and the frequency-sweep driver.

mod direct;
mod gmres;
mod precond;
mod sweep;

pub use direct::DirectSolver;
pub use gmres::{gmres, GmresOutcome, GmresSettings, Identity, LinearOperator, Preconditioner};
pub use precond::{extend_layers, BlockJacobi, SchwarzLayout, SchwarzPreconditioner};
pub use sweep::{
    frequency_sweep, group_dofs, FrequencyRecord, IterativeSettings, SolverChoice, SweepOptions, SweepResult,
};

use alloc::vec::Vec;

/// Source of wall-clock time in seconds. The core crate has no clock of
/// its own; `NoClock` reports zero durations.
pub trait Clock {
    fn now(&self) -> f64;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

/// Statistics of one linear solve.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    /// GMRES iterations, 0 for a direct solve
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub converged: bool,
    /// `‖A x − f‖ / ‖f‖` of the unscaled system
    pub true_residual: f64,
    pub factor_time: f64,
    pub solve_time: f64,
    /// LU factor entries × 16 bytes, summed over all factors
    pub factor_memory: usize,
    /// relative cabin SPL error against a direct solve, when requested
    pub relative_error: Option<f64>,
}
