use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::assembly::{BlockSystem, Coefficient, Part};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::math::{self, dot, C64};

/// Bumped whenever the serialised layout of [`ReducedModel`] changes.
pub const ROM_FORMAT_VERSION: u32 = 1;

/// `Vᴴ T V` of one operator term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedTerm {
    pub label: String,
    pub part: Part,
    pub coefficient: Coefficient,
    pub matrix: DenseMatrix,
}

/// `Vᴴ b` of one load quadrature point at arclength `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedLoad {
    pub s: f64,
    pub vector: Vec<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub f: f64,
    pub error: f64,
}

/// Row weights `L` of the test space `W = L V`.
///
/// Structure rows carry forces and fluid rows `ρ`-scaled volume balances,
/// which differ by roughly `ρω²` in scale. A plain Galerkin projection of the
/// coupled system then weighs the fluid energy far above the load and loses
/// all accuracy a fraction of a hertz from the expansion point. Fluid rows
/// are therefore weighted by `1/(ω²|ρ(f)|)` at the reference frequency.
/// Systems without both kinds of domain get `L = I`.
pub fn test_weights(sys: &BlockSystem, f_ref: f64) -> Vec<f64> {
    let mut w = vec![1.0; sys.n];
    let has_structure = sys.kinds.iter().any(|k| k.is_structure());
    if !has_structure || sys.densities.iter().all(Option::is_none) {
        return w;
    }
    let w2 = math::angular(f_ref).powi(2);
    for (&(a, b), rho) in sys.blocks.iter().zip(&sys.densities) {
        let Some(rho) = rho else { continue };
        let r = rho.eval(f_ref).map(|c| c.norm()).unwrap_or(1.0);
        for x in &mut w[a..b] {
            *x = 1.0 / (w2 * r);
        }
    }
    w
}

/// Petrov–Galerkin projection of a [`BlockSystem`] onto an orthonormal
/// basis `V` with test space `L V` (see [`test_weights`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedModel {
    pub version: u32,
    /// validity window `[f_lo, f_hi]`, Hz
    pub window: [f64; 2],
    /// mesh level of the full model
    pub level: usize,
    /// full dimension
    pub n: usize,
    pub terms: Vec<ReducedTerm>,
    pub amplitude: f64,
    pub wave_speed: f64,
    pub load: Vec<ReducedLoad>,
    /// rows of `V` at the output DoFs (`n_o × r`)
    pub outputs: DenseMatrix,
    /// row of `V` at the probe DoF
    pub probe: Vec<C64>,
    pub expansion_points: Vec<f64>,
    /// errors on the candidate grid of the retained basis
    pub error_log: Vec<ErrorSample>,
    pub converged: bool,
    /// optional `[α, β]` of `D_R = α M_R + β K_R`
    #[serde(default)]
    pub rayleigh: Option<[f64; 2]>,
    /// basis `V`; not serialised
    #[serde(skip)]
    pub basis: Vec<Vec<C64>>,
    #[serde(skip)]
    weights: Vec<f64>,
    #[serde(skip)]
    output_dofs: Vec<usize>,
    #[serde(skip)]
    probe_dof: usize,
}

impl ReducedModel {
    pub fn empty(sys: &BlockSystem, window: [f64; 2], level: usize) -> Self {
        Self {
            version: ROM_FORMAT_VERSION,
            window,
            level,
            n: sys.n,
            terms: sys
                .terms
                .iter()
                .map(|t| ReducedTerm {
                    label: t.label.clone(),
                    part: t.part,
                    coefficient: t.coefficient.clone(),
                    matrix: DenseMatrix::zeros(0, 0),
                })
                .collect(),
            amplitude: sys.load.amplitude,
            wave_speed: sys.load.wave_speed,
            load: sys.load.terms.iter().map(|t| ReducedLoad { s: t.s, vector: Vec::new() }).collect(),
            outputs: DenseMatrix::zeros(sys.spl_dofs.len(), 0),
            probe: Vec::new(),
            expansion_points: Vec::new(),
            error_log: Vec::new(),
            converged: false,
            rayleigh: None,
            basis: Vec::new(),
            weights: test_weights(sys, 0.5 * (window[0] + window[1])),
            output_dofs: sys.spl_dofs.clone(),
            probe_dof: sys.probe_dof,
        }
    }

    /// Projects `sys` onto the columns of `basis`, which must be orthonormal.
    pub fn from_basis(sys: &BlockSystem, basis: &[Vec<C64>], window: [f64; 2], level: usize) -> Self {
        let mut rom = Self::empty(sys, window, level);
        for v in basis {
            rom.extend(sys, v.clone());
        }
        rom
    }

    /// Test-space row weights `L`; empty after deserialisation.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.probe.len()
    }

    /// Appends one basis vector orthonormal to the current basis and
    /// updates the reduced terms by their new row and column only.
    pub fn extend(&mut self, sys: &BlockSystem, v: Vec<C64>) {
        assert_eq!(v.len(), self.n);
        let r = self.dim();
        // conj(L v), so that (Lv)ᴴ T x = (Tᵀ conj(L v))ᵀ x
        let vc: Vec<C64> = v.iter().zip(&self.weights).map(|(x, w)| x.conj() * w).collect();
        let mut tv = vec![C64::zero(); self.n];
        let mut tvc = vec![C64::zero(); self.n];
        for (rt, t) in self.terms.iter_mut().zip(&sys.terms) {
            t.matrix.mul_complex(&v, &mut tv);
            for (x, w) in tv.iter_mut().zip(&self.weights) {
                *x *= w;
            }
            t.matrix.mul_transpose_complex(&vc, &mut tvc);
            rt.matrix.grow_square(r + 1);
            for (i, vi) in self.basis.iter().enumerate() {
                rt.matrix[(i, r)] = dot(vi, &tv);
                rt.matrix[(r, i)] = tvc.iter().zip(vi).map(|(a, b)| a * b).sum();
            }
            rt.matrix[(r, r)] = dot(&v, &tv);
        }
        for (rl, lt) in self.load.iter_mut().zip(&sys.load.terms) {
            rl.vector.push(lt.entries.iter().map(|&(i, b)| vc[i] * b).sum());
        }
        let col: Vec<C64> = self.output_dofs.iter().map(|&i| v[i]).collect();
        self.outputs.push_column(&col);
        self.probe.push(v[self.probe_dof]);
        self.basis.push(v);
    }

    /// Keeps the leading `r` basis vectors.
    pub fn truncate(&mut self, r: usize) {
        if r >= self.dim() {
            return;
        }
        for t in &mut self.terms {
            t.matrix = leading(&t.matrix, r, r);
        }
        for l in &mut self.load {
            l.vector.truncate(r);
        }
        self.outputs = leading(&self.outputs, self.outputs.nrows(), r);
        self.probe.truncate(r);
        self.basis.truncate(r);
    }

    fn sum_part(&self, f: f64, part: Part) -> Result<DenseMatrix> {
        let r = self.dim();
        let mut out = DenseMatrix::zeros(r, r);
        for t in self.terms.iter().filter(|t| t.part == part) {
            out.add_scaled(t.coefficient.eval(f)?, &t.matrix);
        }
        Ok(out)
    }

    /// `K_R(ω)`
    pub fn stiffness(&self, f: f64) -> Result<DenseMatrix> {
        self.sum_part(f, Part::Stiffness)
    }

    /// `M_R(ω)`
    pub fn mass(&self, f: f64) -> Result<DenseMatrix> {
        self.sum_part(f, Part::Mass)
    }

    /// `A_R(ω) = K_R − ω² M_R (+ iω D_R)`.
    pub fn operator(&self, f: f64) -> Result<DenseMatrix> {
        let w = math::angular(f);
        let (ck, cm) = match self.rayleigh {
            None => (C64::new(1.0, 0.0), C64::new(-w * w, 0.0)),
            Some([alpha, beta]) => (C64::new(1.0, w * beta), C64::new(-w * w, w * alpha)),
        };
        let r = self.dim();
        let mut a = DenseMatrix::zeros(r, r);
        for t in &self.terms {
            let c = t.coefficient.eval(f).map_err(|e| e.at(f))?;
            let s = match t.part {
                Part::Stiffness => ck,
                Part::Mass => cm,
            };
            a.add_scaled(s * c, &t.matrix);
        }
        Ok(a)
    }

    /// `f_R(ω) = Vᴴ f(ω)`.
    pub fn load_vector(&self, f: f64) -> Vec<C64> {
        let mut out = vec![C64::zero(); self.dim()];
        let k = -math::angular(f) / self.wave_speed;
        for l in &self.load {
            let ph = self.amplitude * math::cis(k * l.s);
            for (o, v) in out.iter_mut().zip(&l.vector) {
                *o += ph * v;
            }
        }
        out
    }

    /// Reduced coordinates `x_R(ω)`.
    pub fn solve(&self, f: f64) -> Result<Vec<C64>> {
        self.operator(f)?.solve(&self.load_vector(f)).map_err(|e| e.at(f))
    }

    /// Outputs `y_R = C_R x_R`.
    pub fn response(&self, f: f64) -> Result<Vec<C64>> {
        Ok(self.outputs.mul_vec(&self.solve(f)?))
    }

    /// Outputs and probe value in one solve.
    pub fn evaluate(&self, f: f64) -> Result<(Vec<C64>, C64)> {
        let x = self.solve(f)?;
        let probe = self.probe.iter().zip(&x).map(|(a, b)| a * b).sum();
        Ok((self.outputs.mul_vec(&x), probe))
    }

    /// Full-space reconstruction `V x_R`; needs the in-memory basis.
    pub fn expand(&self, xr: &[C64]) -> Result<Vec<C64>> {
        if self.basis.len() != xr.len() {
            return Err(Error::Dimension("reduced model has no basis loaded".into()));
        }
        let mut x = vec![C64::zero(); self.n];
        for (v, c) in self.basis.iter().zip(xr) {
            math::axpy(*c, v, &mut x);
        }
        Ok(x)
    }
}

fn leading(m: &DenseMatrix, rows: usize, cols: usize) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            out[(i, j)] = m[(i, j)];
        }
    }
    out
}

/// Direct projection `((LV)ᴴ A(ω) V, (LV)ᴴ f(ω))` from the assembled
/// operator; `L = I` gives the congruence `Vᴴ A V`.
pub fn project(sys: &BlockSystem, basis: &[Vec<C64>], weights: &[f64], f: f64) -> Result<(DenseMatrix, Vec<C64>)> {
    if basis.iter().any(|v| v.len() != sys.n) || weights.len() != sys.n {
        return Err(Error::Dimension("basis vectors must have the system dimension".into()));
    }
    let a = sys.operator(f)?;
    let r = basis.len();
    let mut out = DenseMatrix::zeros(r, r);
    let mut av = vec![C64::zero(); sys.n];
    for (j, vj) in basis.iter().enumerate() {
        a.mul_vec(vj, &mut av);
        for (x, w) in av.iter_mut().zip(weights) {
            *x *= w;
        }
        for (i, vi) in basis.iter().enumerate() {
            out[(i, j)] = dot(vi, &av);
        }
    }
    let mut b = sys.load_vector(f);
    for (x, w) in b.iter_mut().zip(weights) {
        *x *= w;
    }
    Ok((out, basis.iter().map(|v| dot(v, &b)).collect()))
}
