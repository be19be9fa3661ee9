use alloc::vec::Vec;

use crate::assembly::BlockSystem;
use crate::error::Result;
use crate::lu::SparseLu;
use crate::math::C64;
use crate::solvers::DirectSolver;
use crate::sparse::CsrMatrix;

/// Full system of one mesh level with its reusable symbolic analysis.
/// Outputs are the pressure DoFs of the SPL domain.
pub struct FullOrderModel<'a> {
    pub sys: &'a BlockSystem,
    pub level: usize,
    solver: DirectSolver,
}

impl<'a> FullOrderModel<'a> {
    pub fn new(sys: &'a BlockSystem, level: usize) -> Result<Self> {
        Ok(Self { sys, level, solver: DirectSolver::analyze(&sys.pattern())? })
    }

    pub fn n(&self) -> usize {
        self.sys.n
    }

    pub fn outputs(&self) -> &[usize] {
        &self.sys.spl_dofs
    }

    /// `A(f)` and its LU factors.
    pub fn factor(&self, f: f64) -> Result<(CsrMatrix<C64>, SparseLu)> {
        let a = self.sys.operator(f)?;
        let lu = self.solver.factor(&a).map_err(|e| e.at(f))?;
        Ok((a, lu))
    }

    pub fn solve(&self, f: f64) -> Result<Vec<C64>> {
        let (a, lu) = self.factor(f)?;
        lu.solve_refined(&a, &self.sys.load_vector(f)).map_err(|e| e.at(f))
    }

    pub fn response(&self, f: f64) -> Result<Vec<C64>> {
        let x = self.solve(f)?;
        Ok(self.select(&x))
    }

    pub fn select(&self, x: &[C64]) -> Vec<C64> {
        self.outputs().iter().map(|&i| x[i]).collect()
    }
}
