use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::gmres::Preconditioner;
use crate::config::SchwarzVariant;
use crate::error::Result;
use crate::lu::{SparseLu, Symbolic};
use crate::math::C64;
use crate::sparse::{symmetric_adjacency, CsrMatrix};

/// Block Jacobi: independent exact solves on the diagonal blocks of a
/// partition of the unknowns.
pub struct BlockJacobi {
    n: usize,
    blocks: Vec<(Vec<usize>, SparseLu)>,
}

impl BlockJacobi {
    /// `blocks` must partition `0..n`; each index set sorted ascending.
    pub fn new(a: &CsrMatrix<C64>, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut out = Vec::with_capacity(blocks.len());
        for idx in blocks {
            let sub = a.principal_submatrix(idx);
            out.push((idx.clone(), SparseLu::new(&sub)?));
        }
        Ok(Self { n: a.nrows(), blocks: out })
    }

    pub fn factor_memory(&self) -> usize {
        self.blocks.iter().map(|(_, lu)| lu.memory_bytes()).sum()
    }

    pub fn factor_nnz(&self) -> usize {
        self.blocks.iter().map(|(_, lu)| lu.factor_nnz()).sum()
    }
}

impl Preconditioner for BlockJacobi {
    fn apply(&self, r: &[C64], z: &mut [C64]) {
        debug_assert_eq!(r.len(), self.n);
        for (idx, lu) in &self.blocks {
            let local: Vec<C64> = idx.iter().map(|&i| r[i]).collect();
            let sol = lu.solve(&local).expect("block dimension");
            for (k, &i) in idx.iter().enumerate() {
                z[i] = sol[k];
            }
        }
    }
}

/// Adds `layers` rings of graph neighbours to a sorted index set.
pub fn extend_layers(adj: &[Vec<usize>], set: &[usize], layers: usize) -> Vec<usize> {
    let mut inside = vec![false; adj.len()];
    for &i in set {
        inside[i] = true;
    }
    let mut frontier: Vec<usize> = set.to_vec();
    for _ in 0..layers {
        let mut next = Vec::new();
        for &i in &frontier {
            for &j in &adj[i] {
                if !inside[j] {
                    inside[j] = true;
                    next.push(j);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    (0..adj.len()).filter(|&i| inside[i]).collect()
}

/// Extended subdomains and their symbolic factorisations; depends only on
/// the sparsity pattern, so one layout serves a whole band.
#[derive(Clone, Debug)]
pub struct SchwarzLayout {
    pub n: usize,
    pub overlap: usize,
    pub variant: SchwarzVariant,
    /// extended index sets (sorted)
    pub sets: Vec<Vec<usize>>,
    /// `owned[j][k]`: whether `sets[j][k]` belongs to the original group `j`
    pub owned: Vec<Vec<bool>>,
    symbolic: Vec<Symbolic>,
}

impl SchwarzLayout {
    pub fn new<T: Copy + Zero + core::ops::AddAssign>(
        pattern: &CsrMatrix<T>,
        groups: &[Vec<usize>],
        overlap: usize,
        variant: SchwarzVariant,
    ) -> Result<Self> {
        let adj = symmetric_adjacency(pattern);
        let mut sets = Vec::with_capacity(groups.len());
        let mut owned = Vec::with_capacity(groups.len());
        let mut symbolic = Vec::with_capacity(groups.len());
        for g in groups {
            let ext = extend_layers(&adj, g, overlap);
            let own: Vec<bool> = ext.iter().map(|i| g.binary_search(i).is_ok()).collect();
            let sub = pattern.principal_submatrix(&ext);
            symbolic.push(Symbolic::analyze(&sub)?);
            sets.push(ext);
            owned.push(own);
        }
        Ok(Self { n: pattern.nrows(), overlap, variant, sets, owned, symbolic })
    }

    pub fn factor(&self, a: &CsrMatrix<C64>) -> Result<SchwarzPreconditioner> {
        let mut lus = Vec::with_capacity(self.sets.len());
        for (set, sym) in self.sets.iter().zip(&self.symbolic) {
            lus.push(SparseLu::factor(&a.principal_submatrix(set), sym)?);
        }
        Ok(SchwarzPreconditioner { layout: self.clone_light(), lus })
    }

    fn clone_light(&self) -> SchwarzLayout {
        SchwarzLayout {
            n: self.n,
            overlap: self.overlap,
            variant: self.variant,
            sets: self.sets.clone(),
            owned: self.owned.clone(),
            symbolic: Vec::new(),
        }
    }
}

/// Additive Schwarz `Σ R̃ⱼᵀ Aⱼ⁻¹ Rⱼ` over overlapping subdomains. The
/// restricted variant keeps only each subdomain's own unknowns when
/// combining; the full variant sums every contribution.
pub struct SchwarzPreconditioner {
    layout: SchwarzLayout,
    lus: Vec<SparseLu>,
}

impl SchwarzPreconditioner {
    pub fn new(a: &CsrMatrix<C64>, groups: &[Vec<usize>], overlap: usize, variant: SchwarzVariant) -> Result<Self> {
        SchwarzLayout::new(a, groups, overlap, variant)?.factor(a)
    }

    pub fn factor_memory(&self) -> usize {
        self.lus.iter().map(|lu| lu.memory_bytes()).sum()
    }

    pub fn factor_nnz(&self) -> usize {
        self.lus.iter().map(|lu| lu.factor_nnz()).sum()
    }

    pub fn subdomain_sizes(&self) -> Vec<usize> {
        self.layout.sets.iter().map(|s| s.len()).collect()
    }
}

impl Preconditioner for SchwarzPreconditioner {
    fn apply(&self, r: &[C64], z: &mut [C64]) {
        debug_assert_eq!(r.len(), self.layout.n);
        for v in z.iter_mut() {
            *v = C64::zero();
        }
        let restricted = self.layout.variant == SchwarzVariant::Restricted;
        for ((set, own), lu) in self.layout.sets.iter().zip(&self.layout.owned).zip(&self.lus) {
            let local: Vec<C64> = set.iter().map(|&i| r[i]).collect();
            let sol = lu.solve(&local).expect("subdomain dimension");
            for (k, &i) in set.iter().enumerate() {
                if !restricted || own[k] {
                    z[i] += sol[k];
                }
            }
        }
    }
}
