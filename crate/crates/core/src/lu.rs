//! Sparse direct solver: approximate minimum degree ordering on the
//! symmetrised pattern followed by a left-looking LU with threshold partial
//! pivoting that prefers the diagonal.
//!
//! The ordering (symbolic phase) depends only on the sparsity pattern and is
//! reused for every frequency that shares it; the numeric phase recomputes
//! the factor structure because pivoting may change it.

use alloc::collections::BinaryHeap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::math::C64;
use crate::sparse::{symmetric_adjacency, CsrMatrix};

/// Bytes per stored complex factor entry, used for memory estimates.
pub const BYTES_PER_ENTRY: usize = 16;

#[derive(Clone, Debug)]
pub struct Symbolic {
    n: usize,
    /// `perm[k]` is the original index eliminated at step `k`.
    perm: Vec<usize>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl Symbolic {
    pub fn analyze<T: Copy + Zero + core::ops::AddAssign>(a: &CsrMatrix<T>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Dimension(format!("{}x{} matrix is not square", a.nrows(), a.ncols())));
        }
        let adj = symmetric_adjacency(a);
        let perm = minimum_degree(&adj);
        Ok(Self { n: a.nrows(), perm, row_ptr: a.row_ptr().to_vec(), col_idx: a.col_idx().to_vec() })
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matches<T: Copy + Zero + core::ops::AddAssign>(&self, a: &CsrMatrix<T>) -> bool {
        a.nrows() == self.n && a.row_ptr() == self.row_ptr.as_slice() && a.col_idx() == self.col_idx.as_slice()
    }
}

/// Approximate minimum degree ordering of a symmetric graph given by
/// adjacency lists (no self loops). Ties are broken by the smallest index,
/// so the result is deterministic.
pub fn minimum_degree(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n == 0 {
        return Vec::new();
    }

    // Indistinguishable vertices (equal closed neighbourhoods) become one
    // supervariable from the start; for vector fields this merges the
    // displacement components of a node.
    let closed: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut c = adj[i].clone();
            let pos = c.binary_search(&i).unwrap_err();
            c.insert(pos, i);
            c
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| closed[a].cmp(&closed[b]).then(a.cmp(&b)));
    let mut rep = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut k = 0;
    while k < n {
        let r = order[k];
        let mut m = k;
        while m < n && closed[order[m]] == closed[r] {
            rep[order[m]] = r;
            members[r].push(order[m]);
            m += 1;
        }
        members[r].sort_unstable();
        k = m;
    }
    drop(closed);

    let nv: Vec<usize> = (0..n).map(|i| if rep[i] == i { members[i].len() } else { 0 }).collect();
    let mut a_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        if rep[i] != i {
            continue;
        }
        let mut l: Vec<usize> = adj[i].iter().map(|&j| rep[j]).filter(|&j| j != i).collect();
        l.sort_unstable();
        l.dedup();
        a_list[i] = l;
    }
    let mut e_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut l_elem: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut elem_weight = vec![0usize; n];
    let mut elem_alive = vec![false; n];
    let mut eliminated: Vec<bool> = (0..n).map(|i| rep[i] != i).collect();
    let mut degree = vec![0usize; n];
    let mut heap = BinaryHeap::new();
    let mut live_weight = 0usize;
    for i in 0..n {
        if !eliminated[i] {
            degree[i] = a_list[i].iter().map(|&j| nv[j]).sum();
            heap.push(Reverse((degree[i], i)));
            live_weight += nv[i];
        }
    }

    let mut mark = vec![0usize; n];
    let mut stamp = 0usize;
    let mut w = vec![0usize; n];
    let mut wstamp = vec![0usize; n];
    let mut perm = Vec::with_capacity(n);

    while let Some(Reverse((d, p))) = heap.pop() {
        if eliminated[p] || d != degree[p] {
            continue;
        }
        eliminated[p] = true;
        perm.extend_from_slice(&members[p]);
        live_weight -= nv[p];

        // new element: variables reachable from p
        stamp += 1;
        let mut lp: Vec<usize> = Vec::new();
        for &j in &a_list[p] {
            if !eliminated[j] && mark[j] != stamp {
                mark[j] = stamp;
                lp.push(j);
            }
        }
        let absorbed = core::mem::take(&mut e_list[p]);
        for &e in &absorbed {
            if !elem_alive[e] {
                continue;
            }
            for &j in &l_elem[e] {
                if !eliminated[j] && mark[j] != stamp {
                    mark[j] = stamp;
                    lp.push(j);
                }
            }
            elem_alive[e] = false;
            l_elem[e] = Vec::new();
        }
        a_list[p] = Vec::new();
        lp.sort_unstable();
        let lp_weight: usize = lp.iter().map(|&j| nv[j]).sum();

        for &i in &lp {
            e_list[i].retain(|&e| elem_alive[e]);
            a_list[i].retain(|&j| mark[j] != stamp && !eliminated[j]);
        }
        // w[e] = weight of L_e outside L_p
        for &i in &lp {
            for &e in &e_list[i] {
                if wstamp[e] != stamp {
                    wstamp[e] = stamp;
                    w[e] = elem_weight[e];
                }
                w[e] -= nv[i];
            }
        }
        for &i in &lp {
            // elements entirely covered by the new one are absorbed
            e_list[i].retain(|&e| {
                if w[e] == 0 {
                    elem_alive[e] = false;
                    false
                } else {
                    true
                }
            });
        }
        for &i in &lp {
            e_list[i].retain(|&e| elem_alive[e]);
            let ext: usize = e_list[i].iter().map(|&e| w[e]).sum();
            let own: usize = a_list[i].iter().map(|&j| nv[j]).sum();
            let approx = own + (lp_weight - nv[i]) + ext;
            let bound = live_weight - nv[i];
            let dnew = approx.min(bound).min(degree[i] + lp_weight - nv[i]);
            e_list[i].push(p);
            if dnew != degree[i] {
                degree[i] = dnew;
                heap.push(Reverse((dnew, i)));
            }
        }
        elem_weight[p] = lp_weight;
        elem_alive[p] = true;
        l_elem[p] = lp;
    }
    debug_assert_eq!(perm.len(), n);
    perm
}

/// Numeric LU factors `P A Q = L U` of a square complex matrix.
#[derive(Clone, Debug)]
pub struct SparseLu {
    n: usize,
    /// column order: step `k` eliminates original column `q[k]`
    q: Vec<usize>,
    /// `pinv[i]` is the step at which original row `i` became pivotal
    pinv: Vec<usize>,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<C64>,
    u_ptr: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<C64>,
}

/// Relative threshold below which the diagonal is not accepted as pivot.
pub const DEFAULT_PIVOT_TOL: f64 = 0.01;

impl SparseLu {
    /// Analyse and factor in one step.
    pub fn new(a: &CsrMatrix<C64>) -> Result<Self> {
        let sym = Symbolic::analyze(a)?;
        Self::factor(a, &sym)
    }

    pub fn factor(a: &CsrMatrix<C64>, sym: &Symbolic) -> Result<Self> {
        Self::factor_with_tol(a, sym, DEFAULT_PIVOT_TOL)
    }

    pub fn factor_with_tol(a: &CsrMatrix<C64>, sym: &Symbolic, tol: f64) -> Result<Self> {
        if !sym.matches(a) {
            return Err(Error::Dimension("matrix pattern differs from the analysed pattern".into()));
        }
        let n = a.nrows();
        // rows of Aᵀ are the columns of A
        let at = a.transpose();
        let none = usize::MAX;
        let mut pinv = vec![none; n];
        let mut x = vec![C64::zero(); n];
        let mut xi = vec![0usize; n];
        let mut stack = vec![0usize; n];
        let mut pstack = vec![0usize; n];
        let mut visited = vec![usize::MAX; n];

        let cap = 4 * a.nnz() + n;
        let mut l_ptr = Vec::with_capacity(n + 1);
        let mut l_idx: Vec<usize> = Vec::with_capacity(cap);
        let mut l_val: Vec<C64> = Vec::with_capacity(cap);
        let mut u_ptr = Vec::with_capacity(n + 1);
        let mut u_idx: Vec<usize> = Vec::with_capacity(cap);
        let mut u_val: Vec<C64> = Vec::with_capacity(cap);

        for k in 0..n {
            l_ptr.push(l_idx.len());
            u_ptr.push(u_idx.len());
            let col = sym.perm[k];

            // reach of the column pattern through the graph of L, written
            // into xi[top..n] in topological order
            let mut top = n;
            for (i, _) in at.row(col) {
                if visited[i] == k {
                    continue;
                }
                // iterative depth-first search
                let mut head = 0usize;
                stack[0] = i;
                loop {
                    let j = stack[head];
                    let jl = pinv[j];
                    if visited[j] != k {
                        visited[j] = k;
                        pstack[head] = if jl == none { 0 } else { l_ptr[jl] + 1 };
                    }
                    let end = if jl == none { 0 } else { l_ptr[jl + 1] };
                    let mut done = true;
                    let mut p = pstack[head];
                    while p < end {
                        let r = l_idx[p];
                        p += 1;
                        if visited[r] != k {
                            pstack[head] = p;
                            head += 1;
                            stack[head] = r;
                            done = false;
                            break;
                        }
                    }
                    if done {
                        top -= 1;
                        xi[top] = j;
                        if head == 0 {
                            break;
                        }
                        head -= 1;
                    }
                }
            }

            for &i in &xi[top..n] {
                x[i] = C64::zero();
            }
            for (i, v) in at.row(col) {
                x[i] = v;
            }
            for px in top..n {
                let j = xi[px];
                let jl = pinv[j];
                if jl == none {
                    continue;
                }
                let xj = x[j];
                if xj == C64::zero() {
                    continue;
                }
                let start = l_ptr[jl] + 1;
                let end = l_ptr[jl + 1];
                for p in start..end {
                    x[l_idx[p]] -= l_val[p] * xj;
                }
            }

            let mut ipiv = none;
            let mut amax = -1.0f64;
            for &i in &xi[top..n] {
                if pinv[i] == none {
                    let t = x[i].norm();
                    if t > amax {
                        amax = t;
                        ipiv = i;
                    }
                } else if x[i] != C64::zero() {
                    u_idx.push(pinv[i]);
                    u_val.push(x[i]);
                }
            }
            if ipiv == none {
                return Err(Error::StructurallySingular(col));
            }
            if !(amax > 0.0) || !amax.is_finite() {
                return Err(Error::ZeroPivot(col));
            }
            if pinv[col] == none && x[col].norm() >= tol * amax {
                ipiv = col;
            }
            let pivot = x[ipiv];
            u_idx.push(k);
            u_val.push(pivot);
            pinv[ipiv] = k;
            l_idx.push(ipiv);
            l_val.push(C64::new(1.0, 0.0));
            for &i in &xi[top..n] {
                if pinv[i] == none && x[i] != C64::zero() {
                    l_idx.push(i);
                    l_val.push(x[i] / pivot);
                }
                x[i] = C64::zero();
            }
        }
        l_ptr.push(l_idx.len());
        u_ptr.push(u_idx.len());
        for r in &mut l_idx {
            *r = pinv[*r];
        }
        Ok(Self { n, q: sym.perm.clone(), pinv, l_ptr, l_idx, l_val, u_ptr, u_idx, u_val })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored entries of `L` and `U`, counting both unit and pivot diagonals.
    pub fn factor_nnz(&self) -> usize {
        self.l_idx.len() + self.u_idx.len()
    }

    pub fn memory_bytes(&self) -> usize {
        self.factor_nnz() * BYTES_PER_ENTRY
    }

    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let mut y = vec![C64::zero(); self.n];
        self.solve_into(b, &mut y)?;
        Ok(y)
    }

    pub fn solve_into(&self, b: &[C64], out: &mut [C64]) -> Result<()> {
        let n = self.n;
        if b.len() != n || out.len() != n {
            return Err(Error::Dimension(format!("rhs of length {} for n = {}", b.len(), n)));
        }
        let mut y = vec![C64::zero(); n];
        for i in 0..n {
            y[self.pinv[i]] = b[i];
        }
        for j in 0..n {
            let yj = y[j];
            if yj == C64::zero() {
                continue;
            }
            for p in self.l_ptr[j] + 1..self.l_ptr[j + 1] {
                y[self.l_idx[p]] -= self.l_val[p] * yj;
            }
        }
        for j in (0..n).rev() {
            let last = self.u_ptr[j + 1] - 1;
            y[j] /= self.u_val[last];
            let yj = y[j];
            if yj == C64::zero() {
                continue;
            }
            for p in self.u_ptr[j]..last {
                y[self.u_idx[p]] -= self.u_val[p] * yj;
            }
        }
        for k in 0..n {
            out[self.q[k]] = y[k];
        }
        Ok(())
    }

    /// Solve followed by one step of iterative refinement against `a`.
    pub fn solve_refined(&self, a: &CsrMatrix<C64>, b: &[C64]) -> Result<Vec<C64>> {
        let mut x = self.solve(b)?;
        let r = a.residual(&x, b);
        let dx = self.solve(&r)?;
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
        Ok(x)
    }
}
