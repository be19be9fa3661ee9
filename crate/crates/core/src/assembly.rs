//! Global block system `A(ω) = K(ω) − ω² M(ω)` and the plane-wave load.
//!
//! Every contribution is stored as a real sparse matrix times a scalar
//! frequency-dependent coefficient, so evaluating the operator at a new
//! frequency only rescales and sums fixed matrices on a precomputed union
//! pattern. Fluid rows are kept in density-multiplied form,
//! `K_q = (1 + iη) ∫∇N·∇N` and `M_q = c⁻² ∫NN`, so that the couplings enter
//! as `−t C` in the stiffness (structure rows, fluid columns) and `ρ_q Cᵀ`
//! in the mass (fluid rows, structure columns). Elastic domains are scaled
//! by their out-of-plane thickness `t`; fluid domains are per unit depth.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::config::{Coupling, DomainKind, MaterialRef, ModelConfig};
use crate::element::{self, edge_nodes, gauss};
use crate::error::{Error, Result};
use crate::materials::{self, JcaMaterial, LossFactorTable};
use crate::math::{self, C64};
use crate::mesh::{plate_thickness, Discretisation};
use crate::mortar::{self, CouplingMatrix, MortarInterface};
use crate::sparse::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Stiffness,
    Mass,
}

/// Scalar factor multiplying a stored matrix at frequency `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficient {
    One,
    /// `1 + iη(f)`
    Loss(LossFactorTable),
    /// `1 / c²`
    InvSpeedSquared(f64),
    /// `1 / c_eff(f)²` of a JCA layer
    JcaInvSpeedSquared(JcaMaterial),
    Density(f64),
    /// `ρ_eff(f)` of a JCA layer
    JcaDensity(JcaMaterial),
}

impl Coefficient {
    pub fn eval(&self, f: f64) -> Result<C64> {
        Ok(match self {
            Coefficient::One => C64::new(1.0, 0.0),
            Coefficient::Loss(t) => materials::complex_stiffness_scale(t, f),
            Coefficient::InvSpeedSquared(c) => C64::new(1.0 / (c * c), 0.0),
            Coefficient::JcaInvSpeedSquared(m) => {
                let c = materials::jca_effective(m, f)?.speed;
                C64::new(1.0, 0.0) / (c * c)
            }
            Coefficient::Density(r) => C64::new(*r, 0.0),
            Coefficient::JcaDensity(m) => materials::jca_effective(m, f)?.density,
        })
    }
}

#[derive(Clone, Debug)]
pub struct OperatorTerm {
    pub label: String,
    pub part: Part,
    pub coefficient: Coefficient,
    pub matrix: CsrMatrix<f64>,
}

impl OperatorTerm {
    /// Factor of this term in `A(ω)`: the coefficient, times `−ω²` for mass terms.
    pub fn factor(&self, f: f64) -> Result<C64> {
        let c = self.coefficient.eval(f)?;
        Ok(match self.part {
            Part::Stiffness => c,
            Part::Mass => {
                let w = math::angular(f);
                -w * w * c
            }
        })
    }
}

/// One quadrature point of the plane-wave load: the nodal vector `b`
/// such that `f(ω) = p̂ Σ e^{−iω s / c} b`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadTerm {
    /// arclength along the loaded edge in the travel direction, m
    pub s: f64,
    pub entries: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWaveLoad {
    pub amplitude: f64,
    pub wave_speed: f64,
    pub terms: Vec<LoadTerm>,
}

impl PlaneWaveLoad {
    pub fn phase(&self, term: &LoadTerm, f: f64) -> C64 {
        self.amplitude * math::cis(-math::angular(f) * term.s / self.wave_speed)
    }

    pub fn vector(&self, n: usize, f: f64) -> Vec<C64> {
        let mut out = vec![C64::zero(); n];
        for t in &self.terms {
            let ph = self.phase(t, f);
            for &(i, v) in &t.entries {
                out[i] += ph * v;
            }
        }
        out
    }
}

/// Fluid-structure pair coupled by a mortar interface.
#[derive(Clone, Debug)]
pub struct CoupledPair {
    pub structure: usize,
    pub fluid: usize,
    pub interface: MortarInterface,
    pub coupling: CouplingMatrix,
}

#[derive(Clone, Debug)]
pub struct BlockSystem {
    pub n: usize,
    pub terms: Vec<OperatorTerm>,
    pub load: PlaneWaveLoad,
    /// global DoF range of each domain
    pub blocks: Vec<(usize, usize)>,
    pub kinds: Vec<DomainKind>,
    /// density coefficient of each pressure domain
    pub densities: Vec<Option<Coefficient>>,
    pub couplings: Vec<CoupledPair>,
    /// pressure DoFs averaged for the SPL output
    pub spl_dofs: Vec<usize>,
    pub probe_dof: usize,
    pattern_ptr: Vec<usize>,
    pattern_idx: Vec<usize>,
    term_maps: Vec<Vec<usize>>,
}

fn element_triplets9(dofs: &[usize], m: &element::Mat9, out: &mut Vec<(usize, usize, f64)>) {
    for a in 0..9 {
        for b in 0..9 {
            out.push((dofs[a], dofs[b], m[a][b]));
        }
    }
}

fn element_triplets18(dofs: &[usize], m: &element::Mat18, out: &mut Vec<(usize, usize, f64)>) {
    for a in 0..18 {
        for b in 0..18 {
            out.push((dofs[a], dofs[b], m[a][b]));
        }
    }
}

impl BlockSystem {
    /// Assembles all operator terms, couplings and the load of one
    /// discretisation level.
    pub fn build(cfg: &ModelConfig, disc: &Discretisation) -> Result<Self> {
        Self::build_with(cfg, disc, mortar::DEFAULT_GAUSS)
    }

    pub fn build_with(cfg: &ModelConfig, disc: &Discretisation, n_gp: usize) -> Result<Self> {
        let n = disc.ndof;
        let mut terms = Vec::new();
        for (d, dom) in cfg.domains.iter().enumerate() {
            let mesh = &disc.meshes[d];
            let loss = match cfg.damping(dom) {
                Some(t) => Coefficient::Loss(t.clone()),
                None => Coefficient::One,
            };
            match cfg.material(dom) {
                MaterialRef::Elastic(mat) => {
                    let (tx, ty) = mat.tension();
                    let h = plate_thickness(&dom.rect);
                    let (sx, sy) = (tx / h, ty / h);
                    let mut k = Vec::new();
                    let mut g = Vec::new();
                    let mut m = Vec::new();
                    for e in 0..mesh.elements.len() {
                        let geo = mesh.geometry(e);
                        let dofs = disc.element_dofs(d, e);
                        let ke = element::elastic_stiffness(&geo, mat.youngs_modulus, mat.poisson_ratio, mat.thickness, e)?;
                        element_triplets18(&dofs, &ke, &mut k);
                        if sx != 0.0 || sy != 0.0 {
                            let kg = element::geometric_stiffness(&geo, sx, sy, mat.thickness, e)?;
                            element_triplets18(&dofs, &kg, &mut g);
                        }
                        let me = element::elastic_mass(&geo, mat.density, mat.thickness, e)?;
                        element_triplets18(&dofs, &me, &mut m);
                    }
                    terms.push(OperatorTerm {
                        label: format!("K_{}", dom.id),
                        part: Part::Stiffness,
                        coefficient: loss,
                        matrix: CsrMatrix::from_triplets(n, n, k),
                    });
                    if !g.is_empty() {
                        terms.push(OperatorTerm {
                            label: format!("Kg_{}", dom.id),
                            part: Part::Stiffness,
                            coefficient: Coefficient::One,
                            matrix: CsrMatrix::from_triplets(n, n, g),
                        });
                    }
                    terms.push(OperatorTerm {
                        label: format!("M_{}", dom.id),
                        part: Part::Mass,
                        coefficient: Coefficient::One,
                        matrix: CsrMatrix::from_triplets(n, n, m),
                    });
                }
                fluid => {
                    let mut k = Vec::new();
                    let mut m = Vec::new();
                    for e in 0..mesh.elements.len() {
                        let geo = mesh.geometry(e);
                        let dofs = disc.element_dofs(d, e);
                        element_triplets9(&dofs, &element::scalar_laplace(&geo, e)?, &mut k);
                        element_triplets9(&dofs, &element::scalar_mass(&geo, e)?, &mut m);
                    }
                    let mass_coef = match fluid {
                        MaterialRef::Acoustic(a) => Coefficient::InvSpeedSquared(a.speed_of_sound),
                        MaterialRef::Jca(j) => Coefficient::JcaInvSpeedSquared(j.clone()),
                        MaterialRef::Elastic(_) => unreachable!(),
                    };
                    terms.push(OperatorTerm {
                        label: format!("K_{}", dom.id),
                        part: Part::Stiffness,
                        coefficient: loss,
                        matrix: CsrMatrix::from_triplets(n, n, k),
                    });
                    terms.push(OperatorTerm {
                        label: format!("M_{}", dom.id),
                        part: Part::Mass,
                        coefficient: mass_coef,
                        matrix: CsrMatrix::from_triplets(n, n, m),
                    });
                }
            }
        }

        let densities: Vec<Option<Coefficient>> = cfg
            .domains
            .iter()
            .map(|dom| match cfg.material(dom) {
                MaterialRef::Acoustic(m) => Some(Coefficient::Density(m.density)),
                MaterialRef::Jca(m) => Some(Coefficient::JcaDensity(m.clone())),
                MaterialRef::Elastic(_) => None,
            })
            .collect();
        let mut couplings = Vec::new();
        for itf in cfg.interfaces.iter().filter(|i| i.coupling == Coupling::Fsi) {
            let a = cfg.domain_index(&itf.left).unwrap();
            let b = cfg.domain_index(&itf.right).unwrap();
            let (s, f) = if disc.kinds[a].is_structure() { (a, b) } else { (b, a) };
            let mi = mortar::detect_interfaces(&disc.meshes[s], &disc.meshes[f], n_gp)?;
            let c = mortar::assemble_coupling(&mi, disc, s, f);
            let rho = densities[f].clone().expect("fluid side has a density");
            // structure rows carry the out-of-plane depth, fluid rows are per unit depth
            let depth = match cfg.material(&cfg.domains[s]) {
                MaterialRef::Elastic(m) => m.thickness,
                _ => unreachable!(),
            };
            let (ids, idf) = (&cfg.domains[s].id, &cfg.domains[f].id);
            terms.push(OperatorTerm {
                label: format!("C_{ids}_{idf}"),
                part: Part::Stiffness,
                coefficient: Coefficient::One,
                matrix: c.matrix.map(|v| -v * depth),
            });
            terms.push(OperatorTerm {
                label: format!("rhoCt_{idf}_{ids}"),
                part: Part::Mass,
                coefficient: rho,
                matrix: c.matrix.transpose(),
            });
            couplings.push(CoupledPair { structure: s, fluid: f, interface: mi, coupling: c });
        }

        let mut load = plane_wave_load(cfg, disc)?;
        let fixed = clamped_dofs(cfg, disc);
        if !fixed.is_empty() {
            apply_clamps(&mut terms, &mut load, &fixed, n);
        }

        let spl = cfg.spl_domain().ok_or_else(|| Error::Validation("no SPL domain".into()))?;
        let spl_dofs = disc.pressure_dofs(spl);
        let probe_pt = cfg.solver.probe.unwrap_or_else(|| {
            let r = &cfg.domains[spl].rect;
            [0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)]
        });
        let probe_dof = disc.node_dof[spl][disc.meshes[spl].nearest_node(probe_pt)];

        let mut sys = Self {
            n,
            terms,
            load,
            blocks: disc.blocks.clone(),
            kinds: disc.kinds.clone(),
            densities,
            couplings,
            spl_dofs,
            probe_dof,
            pattern_ptr: Vec::new(),
            pattern_idx: Vec::new(),
            term_maps: Vec::new(),
        };
        sys.build_pattern();
        Ok(sys)
    }

    /// System made of given terms and load only (tests, synthetic models).
    pub fn from_terms(n: usize, terms: Vec<OperatorTerm>, load: PlaneWaveLoad, outputs: Vec<usize>) -> Self {
        let probe_dof = outputs.first().copied().unwrap_or(0);
        let mut sys = Self {
            n,
            terms,
            load,
            blocks: vec![(0, n)],
            kinds: vec![DomainKind::Acoustic],
            densities: vec![None],
            couplings: Vec::new(),
            spl_dofs: outputs,
            probe_dof,
            pattern_ptr: Vec::new(),
            pattern_idx: Vec::new(),
            term_maps: Vec::new(),
        };
        sys.build_pattern();
        sys
    }

    fn build_pattern(&mut self) {
        let n = self.n;
        // union of all term patterns plus the diagonal
        let mut rows: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        for t in &self.terms {
            for i in 0..n {
                rows[i].extend_from_slice(&t.matrix.col_idx()[t.matrix.row_ptr()[i]..t.matrix.row_ptr()[i + 1]]);
            }
        }
        let mut ptr = Vec::with_capacity(n + 1);
        ptr.push(0);
        let mut idx = Vec::new();
        for r in &mut rows {
            r.sort_unstable();
            r.dedup();
            idx.extend_from_slice(r);
            ptr.push(idx.len());
        }
        let mut maps = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let mut map = Vec::with_capacity(t.matrix.nnz());
            for i in 0..n {
                let row = &idx[ptr[i]..ptr[i + 1]];
                for &j in &t.matrix.col_idx()[t.matrix.row_ptr()[i]..t.matrix.row_ptr()[i + 1]] {
                    map.push(ptr[i] + row.binary_search(&j).unwrap());
                }
            }
            maps.push(map);
        }
        self.pattern_ptr = ptr;
        self.pattern_idx = idx;
        self.term_maps = maps;
    }

    fn combine(&self, factor: impl Fn(&OperatorTerm) -> Result<Option<C64>>) -> Result<CsrMatrix<C64>> {
        let mut vals = vec![C64::zero(); self.pattern_idx.len()];
        for (t, map) in self.terms.iter().zip(&self.term_maps) {
            let Some(c) = factor(t)? else { continue };
            for (k, &v) in t.matrix.values().iter().enumerate() {
                vals[map[k]] += c * v;
            }
        }
        Ok(CsrMatrix::from_parts(self.n, self.n, self.pattern_ptr.clone(), self.pattern_idx.clone(), vals))
    }

    /// `A(ω) = K(ω) − ω² M(ω)` at `f` Hz on the union pattern.
    pub fn operator(&self, f: f64) -> Result<CsrMatrix<C64>> {
        let a = self.combine(|t| t.factor(f).map(Some)).map_err(|e| e.at(f))?;
        if !a.all_finite() {
            return Err(Error::Domain(format!("non-finite operator entries at {f} Hz")));
        }
        Ok(a)
    }

    /// `K(ω)` on the union pattern.
    pub fn stiffness(&self, f: f64) -> Result<CsrMatrix<C64>> {
        self.combine(|t| if t.part == Part::Stiffness { t.coefficient.eval(f).map(Some) } else { Ok(None) })
    }

    /// `M(ω)` on the union pattern.
    pub fn mass(&self, f: f64) -> Result<CsrMatrix<C64>> {
        self.combine(|t| if t.part == Part::Mass { t.coefficient.eval(f).map(Some) } else { Ok(None) })
    }

    pub fn load_vector(&self, f: f64) -> Vec<C64> {
        self.load.vector(self.n, f)
    }

    /// Pattern shared by every `operator(f)`.
    pub fn pattern(&self) -> CsrMatrix<f64> {
        CsrMatrix::from_parts(
            self.n,
            self.n,
            self.pattern_ptr.clone(),
            self.pattern_idx.clone(),
            vec![0.0; self.pattern_idx.len()],
        )
    }

    /// Mean SPL over the output pressure DoFs of a solution.
    pub fn spl(&self, x: &[C64]) -> f64 {
        let p: Vec<C64> = self.spl_dofs.iter().map(|&i| x[i]).collect();
        math::spl(&p)
    }
}

/// Displacement DoFs on clamped edges, sorted.
pub fn clamped_dofs(cfg: &ModelConfig, disc: &Discretisation) -> Vec<usize> {
    let mut out = Vec::new();
    for (d, dom) in cfg.domains.iter().enumerate() {
        for &side in &dom.clamped {
            for node in disc.meshes[d].boundary_nodes(side) {
                let base = disc.node_dof[d][node];
                out.extend([base, base + 1]);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Removes the rows and columns of `fixed` from every term and the load and
/// adds a unit diagonal for them, so their solution is exactly zero.
fn apply_clamps(terms: &mut Vec<OperatorTerm>, load: &mut PlaneWaveLoad, fixed: &[usize], n: usize) {
    let mut is_fixed = vec![false; n];
    for &i in fixed {
        is_fixed[i] = true;
    }
    for t in terms.iter_mut() {
        let kept: Vec<(usize, usize, f64)> = t.matrix.triplets().filter(|&(i, j, _)| !is_fixed[i] && !is_fixed[j]).collect();
        t.matrix = CsrMatrix::from_triplets(n, n, kept);
    }
    for lt in &mut load.terms {
        lt.entries.retain(|&(i, _)| !is_fixed[i]);
    }
    terms.push(OperatorTerm {
        label: "clamp".into(),
        part: Part::Stiffness,
        coefficient: Coefficient::One,
        matrix: CsrMatrix::from_triplets(n, n, fixed.iter().map(|&i| (i, i, 1.0)).collect()),
    });
}

/// Consistent nodal forces of the plane-wave pressure `p̂ e^{−iωs/c}` acting
/// on the loaded edge; the traction is `−p n` with `n` the outward normal.
pub fn plane_wave_load(cfg: &ModelConfig, disc: &Discretisation) -> Result<PlaneWaveLoad> {
    let ld = &cfg.load;
    let d = cfg.domain_index(&ld.target).ok_or_else(|| Error::Validation(format!("unknown load target {}", ld.target)))?;
    let thickness = match cfg.material(&cfg.domains[d]) {
        MaterialRef::Elastic(m) => m.thickness,
        _ => return Err(Error::Validation("load target is not elastic".into())),
    };
    let mesh = &disc.meshes[d];
    let seg = mesh.rect.edge(ld.edge);
    let normal = ld.edge.outward_normal();
    let rule = gauss(5);
    let mut terms = Vec::new();
    for tr in mesh.boundary(ld.edge) {
        let conn = &mesh.elements[tr.element];
        let jac = 0.5 * (tr.hi - tr.lo);
        for &(t, w) in &rule {
            let along = 0.5 * (tr.lo + tr.hi) + t * jac;
            let s = if ld.direction > 0 { along - seg.lo } else { seg.hi - along };
            let l = element::lagrange1(t);
            let mut entries = Vec::with_capacity(6);
            for (k, &node) in edge_nodes(ld.edge).iter().enumerate() {
                let base = disc.node_dof[d][conn[node]];
                for comp in 0..2 {
                    if normal[comp] != 0.0 {
                        entries.push((base + comp, -normal[comp] * l[k] * w * jac * thickness));
                    }
                }
            }
            terms.push(LoadTerm { s, entries });
        }
    }
    Ok(PlaneWaveLoad { amplitude: ld.amplitude, wave_speed: ld.wave_speed, terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients() {
        let t = LossFactorTable::constant("t", 0.05);
        assert_eq!(Coefficient::Loss(t).eval(100.0).unwrap(), C64::new(1.0, 0.05));
        assert_eq!(Coefficient::InvSpeedSquared(2.0).eval(1.0).unwrap(), C64::new(0.25, 0.0));
        let term = OperatorTerm {
            label: "m".into(),
            part: Part::Mass,
            coefficient: Coefficient::One,
            matrix: CsrMatrix::identity(1, 1.0),
        };
        let w = math::angular(3.0);
        assert!((term.factor(3.0).unwrap() + w * w).norm() < 1e-12);
    }
}
