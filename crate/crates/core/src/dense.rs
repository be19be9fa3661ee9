//! Small column-major complex dense matrices for reduced models.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![C64::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_columns(nrows: usize, cols: &[Vec<C64>]) -> Self {
        let mut data = Vec::with_capacity(nrows * cols.len());
        for c in cols {
            assert_eq!(c.len(), nrows);
            data.extend_from_slice(c);
        }
        Self { nrows, ncols: cols.len(), data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn column(&self, j: usize) -> &[C64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn push_column(&mut self, c: &[C64]) {
        assert_eq!(c.len(), self.nrows);
        self.data.extend_from_slice(c);
        self.ncols += 1;
    }

    /// Grows a square matrix to `n × n`, keeping the leading block.
    pub fn grow_square(&mut self, n: usize) {
        assert_eq!(self.nrows, self.ncols);
        let old = core::mem::replace(self, Self::zeros(n, n));
        for j in 0..old.ncols {
            for i in 0..old.nrows {
                self[(i, j)] = old[(i, j)];
            }
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![C64::zero(); self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == C64::zero() {
                continue;
            }
            for (yi, a) in y.iter_mut().zip(self.column(j)) {
                *yi += a * xj;
            }
        }
        y
    }

    /// `selfᴴ x`.
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.nrows);
        (0..self.ncols).map(|j| crate::math::dot(self.column(j), x)).collect()
    }

    /// `self + s · other`.
    pub fn add_scaled(&mut self, s: C64, other: &DenseMatrix) {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Solves `self · x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        DenseLu::factor(self.clone())?.solve(b)
    }
}

impl core::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[j * self.nrows + i]
    }
}

impl core::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[j * self.nrows + i]
    }
}

pub struct DenseLu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl DenseLu {
    pub fn factor(mut a: DenseMatrix) -> Result<Self> {
        let n = a.nrows;
        if a.ncols != n {
            return Err(Error::Dimension(alloc::format!("LU of {}x{} matrix", n, a.ncols)));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n).map(|i| (i, a[(i, k)].norm())).fold((k, -1.0), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
            if pmax == 0.0 || !pmax.is_finite() {
                return Err(Error::ZeroPivot(k));
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = t;
                }
            }
            let piv = a[(k, k)];
            for i in k + 1..n {
                a[(i, k)] /= piv;
            }
            for j in k + 1..n {
                let akj = a[(k, j)];
                if akj == C64::zero() {
                    continue;
                }
                for i in k + 1..n {
                    let lik = a[(i, k)];
                    a[(i, j)] -= lik * akj;
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let n = self.lu.nrows;
        if b.len() != n {
            return Err(Error::Dimension(alloc::format!("rhs of length {} for n = {}", b.len(), n)));
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for j in 0..n {
            let xj = x[j];
            for i in j + 1..n {
                x[i] -= self.lu[(i, j)] * xj;
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.lu[(j, j)];
            let xj = x[j];
            for i in 0..j {
                x[i] -= self.lu[(i, j)] * xj;
            }
        }
        Ok(x)
    }
}

/// Modified Gram–Schmidt with one reorthogonalisation pass. Returns the
/// residual norm before normalisation; `v` is normalised in place when the
/// norm exceeds `drop_tol` relative to its starting norm.
pub fn orthogonalize(basis: &[Vec<C64>], v: &mut [C64], drop_tol: f64) -> Option<f64> {
    let start = crate::math::norm2(v);
    if start == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for q in basis {
            let h = crate::math::dot(q, v);
            crate::math::axpy(-h, q, v);
        }
    }
    let nrm = crate::math::norm2(v);
    if nrm <= drop_tol * start {
        return None;
    }
    for x in v.iter_mut() {
        *x /= nrm;
    }
    Some(nrm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_complex_inverse() {
        let mut a = DenseMatrix::zeros(2, 2);
        a[(0, 0)] = C64::new(1.0, 1.0);
        a[(0, 1)] = C64::new(2.0, 0.0);
        a[(1, 0)] = C64::new(0.0, -1.0);
        a[(1, 1)] = C64::new(3.0, 0.5);
        let x_true = [C64::new(0.5, -2.0), C64::new(-1.0, 0.25)];
        let b = a.mul_vec(&x_true);
        let x = a.solve(&b).unwrap();
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).norm() < 1e-14);
        }
    }

    #[test]
    fn singular_is_reported() {
        let a = DenseMatrix::zeros(2, 2);
        assert!(matches!(a.solve(&[C64::zero(); 2]), Err(Error::ZeroPivot(0))));
    }

    #[test]
    fn orthogonalize_drops_dependent() {
        let e0 = vec![C64::new(1.0, 0.0), C64::zero()];
        let mut v = vec![C64::new(3.0, 0.0), C64::zero()];
        assert!(orthogonalize(&[e0.clone()], &mut v, 1e-12).is_none());
        let mut w = vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
        let n = orthogonalize(&[e0], &mut w, 1e-12).unwrap();
        assert!((n - 2.0).abs() < 1e-15);
        assert!((w[1] - C64::new(0.0, 1.0)).norm() < 1e-15);
    }
}
