use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::fom::FullOrderModel;
use crate::dense::orthogonalize;
use crate::error::{Error, Result};
use crate::math::{angular, axpy, dot, norm2, C64};

/// Relative norm below which a new Krylov direction counts as dependent.
pub(crate) const BREAKDOWN_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct KrylovBlock {
    pub f: f64,
    /// orthonormal columns
    pub vectors: Vec<Vec<C64>>,
    /// fewer than the requested moments could be generated
    pub breakdown: bool,
}

/// Orthonormal basis of `m` moments of the load response at `f_j`.
///
/// With coefficients frozen at `f_j`, `A(ω) = K̃ − (ω² − ω_j²) M̃` where
/// `K̃ = A(ω_j)` and `M̃ = M(ω_j)`, so the first-order block spans
/// `{K̃⁻¹f, (K̃⁻¹M̃) K̃⁻¹f, …}` (moments in `ω²`). The second-order variant
/// expands in `ω` instead, `A = K̃ + δ D̃ − δ² M̃` with `D̃ = −2ω_j M̃`, and
/// runs a second-order Arnoldi process on that pair. Both use a single LU
/// of `K̃`.
pub fn krylov_block(fom: &FullOrderModel, f_j: f64, m: usize, second_order: bool) -> Result<KrylovBlock> {
    if m == 0 {
        return Err(Error::Validation("moments_per_point must be at least 1".into()));
    }
    let n = fom.n();
    let (_, lu) = fom.factor(f_j)?;
    let mass = fom.sys.mass(f_j)?;
    let b = fom.sys.load_vector(f_j);
    let mut r0 = lu.solve(&b).map_err(|e| e.at(f_j))?;
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(m);
    if orthogonalize(&q, &mut r0, BREAKDOWN_TOL).is_none() {
        return Ok(KrylovBlock { f: f_j, vectors: q, breakdown: true });
    }
    q.push(r0);
    let mut breakdown = false;
    let mut mv = vec![C64::zero(); n];
    if !second_order {
        while q.len() < m {
            mass.mul_vec(q.last().unwrap(), &mut mv);
            let mut w = lu.solve(&mv).map_err(|e| e.at(f_j))?;
            if orthogonalize(&q, &mut w, BREAKDOWN_TOL).is_none() {
                breakdown = true;
                break;
            }
            q.push(w);
        }
    } else {
        let wj = angular(f_j);
        // companion vectors p_k carry the previous moment
        let mut p: Vec<Vec<C64>> = vec![vec![C64::zero(); n]];
        while q.len() < m {
            let k = q.len() - 1;
            // r = K̃⁻¹(2ω_j M̃ q_k + M̃ p_k), s = q_k
            let u: Vec<C64> = q[k].iter().zip(&p[k]).map(|(a, b)| a * (2.0 * wj) + b).collect();
            mass.mul_vec(&u, &mut mv);
            let mut r = lu.solve(&mv).map_err(|e| e.at(f_j))?;
            let mut s = q[k].clone();
            let start = norm2(&r);
            for _ in 0..2 {
                for (qi, pi) in q.iter().zip(&p) {
                    let t = dot(qi, &r);
                    axpy(-t, qi, &mut r);
                    axpy(-t, pi, &mut s);
                }
            }
            let t = norm2(&r);
            if start == 0.0 || t <= BREAKDOWN_TOL * start {
                breakdown = true;
                break;
            }
            for v in r.iter_mut() {
                *v /= t;
            }
            for v in s.iter_mut() {
                *v /= t;
            }
            q.push(r);
            p.push(s);
        }
    }
    Ok(KrylovBlock { f: f_j, vectors: q, breakdown })
}
