use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::math::{axpy, dot, norm2, C64};
use crate::sparse::CsrMatrix;

pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[C64], y: &mut [C64]);
}

impl LinearOperator for CsrMatrix<C64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.mul_vec(x, y)
    }
}

pub trait Preconditioner {
    /// `z = M⁻¹ r`
    fn apply(&self, r: &[C64], z: &mut [C64]);
}

pub struct Identity;

impl Preconditioner for Identity {
    fn apply(&self, r: &[C64], z: &mut [C64]) {
        z.copy_from_slice(r);
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GmresSettings {
    pub atol: f64,
    pub rtol: f64,
    pub max_it: usize,
    pub restart: usize,
}

impl Default for GmresSettings {
    fn default() -> Self {
        Self { atol: 1e-4, rtol: 1e-5, max_it: 150, restart: 1000 }
    }
}

#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub x: Vec<C64>,
    pub iterations: usize,
    /// residual norm estimate after each iteration, starting with `‖r₀‖`
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

/// Right-preconditioned restarted GMRES with modified Gram–Schmidt. A cycle
/// ends at `restart` steps, on a happy breakdown, or when the estimated
/// residual reaches `max(rtol ‖b‖, atol)`; the solve stops once the true
/// residual meets that bound or after `max_it` iterations (returning the
/// last iterate).
pub fn gmres(
    a: &dyn LinearOperator,
    m: &dyn Preconditioner,
    b: &[C64],
    x0: Option<&[C64]>,
    s: &GmresSettings,
) -> GmresOutcome {
    let n = a.dim();
    assert_eq!(b.len(), n);
    let tol = (s.rtol * norm2(b)).max(s.atol);
    let mut x = match x0 {
        Some(v) => v.to_vec(),
        None => vec![C64::zero(); n],
    };
    let mut r = vec![C64::zero(); n];
    let residual = |x: &[C64], r: &mut [C64]| {
        a.apply(x, r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
    };
    residual(&x, &mut r);
    let mut beta = norm2(&r);
    let mut history = vec![beta];
    let mut its = 0usize;
    if beta <= tol {
        return GmresOutcome { x, iterations: 0, residual_history: history, converged: true };
    }
    let restart = s.restart.max(1);
    let mut w = vec![C64::zero(); n];
    let mut converged;
    loop {
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(restart.min(s.max_it) + 1);
        basis.push(r.iter().map(|v| v / beta).collect());
        // preconditioned directions are kept so the update does not apply
        // M⁻¹ to a recombined vector, which loses accuracy when M is
        // ill-conditioned
        let mut zs: Vec<Vec<C64>> = Vec::with_capacity(restart.min(s.max_it));
        let mut h: Vec<Vec<C64>> = Vec::new();
        let mut cs: Vec<f64> = Vec::new();
        let mut sn: Vec<C64> = Vec::new();
        let mut g = vec![C64::new(beta, 0.0)];
        let mut k = 0;
        while k < restart && its < s.max_it {
            its += 1;
            let mut z = vec![C64::zero(); n];
            m.apply(&basis[k], &mut z);
            a.apply(&z, &mut w);
            zs.push(z);
            let mut col = vec![C64::zero(); k + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(v, &w);
                axpy(-hij, v, &mut w);
                col[i] = hij;
            }
            let hnext = norm2(&w);
            col[k + 1] = C64::new(hnext, 0.0);
            for i in 0..k {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i].conj() * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let (c, sv) = givens(col[k], col[k + 1]);
            col[k] = c * col[k] + sv * col[k + 1];
            col[k + 1] = C64::zero();
            cs.push(c);
            sn.push(sv);
            let gk = g[k];
            g[k] = c * gk;
            g.push(-sv.conj() * gk);
            h.push(col);
            k += 1;
            let res = g[k].norm();
            history.push(res);
            // a small estimate or a happy breakdown ends the cycle
            if res <= tol || hnext == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / hnext).collect());
        }
        // back substitution on the triangular Hessenberg factor
        let mut y = vec![C64::zero(); k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= h[j][i] * y[j];
            }
            y[i] = acc / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            axpy(*yj, &zs[j], &mut x);
        }
        residual(&x, &mut r);
        beta = norm2(&r);
        // the recurrence estimate can drift below the true residual on
        // ill-conditioned systems; only the true residual ends the solve
        converged = beta <= tol;
        if converged || its >= s.max_it {
            break;
        }
    }
    GmresOutcome { x, iterations: its, residual_history: history, converged }
}

/// Complex Givens rotation `(c, s)` with real `c` annihilating `b` in `(a, b)`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (1.0, C64::zero());
    }
    if na == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let d = libm::hypot(na, nb);
    (na / d, (a / na) * b.conj() / d)
}
