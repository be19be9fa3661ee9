//! Fluid–structure coupling of possibly non-conforming meshes.
//!
//! The shared side of a structure and a fluid rectangle is cut into
//! interface elements: the 1D intersections of the two boundary traces.
//! Gauss points of each interface element are mapped back into both parent
//! elements with the Newton inverse map and the coupling integral
//! `C[(a, i), b] = Σ W_l N^s_a(ξ^s_l) N^f_b(ξ^f_l) n_i J^e` is accumulated.
//! `n` is the unit normal pointing out of the fluid (into the structure).

use alloc::format;
use alloc::vec::Vec;

use crate::config::{shared_segment, Edge, Segment, GEOM_TOL};
use crate::element::{self, edge_nodes, gauss};
use crate::error::{Error, Result};
use crate::mesh::{Discretisation, Mesh};
use crate::sparse::CsrMatrix;

/// Default Gauss points per interface element.
pub const DEFAULT_GAUSS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MappedPoint {
    pub x: [f64; 2],
    pub weight: f64,
    /// parameter in the interface element, `[−1, 1]`
    pub xi_e: f64,
    pub xi_s: [f64; 2],
    pub xi_f: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceElement {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub structure_element: usize,
    pub structure_edge: Edge,
    pub fluid_element: usize,
    pub fluid_edge: Edge,
    /// `length / 2`
    pub jacobian: f64,
    pub points: Vec<MappedPoint>,
}

impl InterfaceElement {
    pub fn length(&self) -> f64 {
        2.0 * self.jacobian
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MortarInterface {
    pub segment: Segment,
    /// side of the structure rectangle carrying the interface
    pub structure_side: Edge,
    /// unit normal out of the fluid
    pub normal: [f64; 2],
    pub elements: Vec<InterfaceElement>,
}

/// Cuts the shared side of two meshes into interface elements and maps
/// `n_gp` Gauss points of each into both parents.
pub fn detect_interfaces(mesh_s: &Mesh, mesh_f: &Mesh, n_gp: usize) -> Result<MortarInterface> {
    let (seg, side) = shared_segment(&mesh_s.rect, &mesh_f.rect).ok_or_else(|| {
        Error::NonColinear(format!("rectangles {:?} and {:?} share no side", mesh_s.rect, mesh_f.rect))
    })?;
    let ts = mesh_s.boundary(side);
    let tf = mesh_f.boundary(side.opposite());
    let rule = gauss(n_gp);
    let mut elements = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < ts.len() && j < tf.len() {
        let (s, f) = (ts[i], tf[j]);
        let lo = s.lo.max(f.lo).max(seg.lo);
        let hi = s.hi.min(f.hi).min(seg.hi);
        if hi - lo > GEOM_TOL {
            let gs = mesh_s.geometry(s.element);
            let gf = mesh_f.geometry(f.element);
            let jac = 0.5 * (hi - lo);
            let mut points = Vec::with_capacity(rule.len());
            for &(t, w) in &rule {
                let x = seg.point(0.5 * (lo + hi) + t * jac);
                let xi_s = gs.inverse_map(x, s.element)?;
                let xi_f = gf.inverse_map(x, f.element)?;
                points.push(MappedPoint { x, weight: w, xi_e: t, xi_s, xi_f });
            }
            elements.push(InterfaceElement {
                a: seg.point(lo),
                b: seg.point(hi),
                structure_element: s.element,
                structure_edge: side,
                fluid_element: f.element,
                fluid_edge: side.opposite(),
                jacobian: jac,
                points,
            });
        }
        if s.hi < f.hi {
            i += 1;
        } else if f.hi < s.hi {
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    let covered: f64 = elements.iter().map(|e| e.length()).sum();
    if (covered - seg.len()).abs() > 1e-12 * seg.len().max(1.0) {
        return Err(Error::Geometry(format!(
            "interface elements cover {covered} m of a {} m side",
            seg.len()
        )));
    }
    Ok(MortarInterface { segment: seg, structure_side: side, normal: side.opposite().outward_normal(), elements })
}

/// Coupling entries in mesh-local numbering:
/// `(structure node, displacement component, fluid node, value)`.
pub fn coupling_entries(itf: &MortarInterface, mesh_s: &Mesh, mesh_f: &Mesh) -> Vec<(usize, usize, usize, f64)> {
    let mut out = Vec::new();
    for ie in &itf.elements {
        let cs = &mesh_s.elements[ie.structure_element];
        let cf = &mesh_f.elements[ie.fluid_element];
        for p in &ie.points {
            let ns = element::shape(p.xi_s[0], p.xi_s[1]);
            let nf = element::shape(p.xi_f[0], p.xi_f[1]);
            let w = p.weight * ie.jacobian;
            for comp in 0..2 {
                let n = itf.normal[comp];
                if n == 0.0 {
                    continue;
                }
                // only nodes on the coupled edges carry non-zero traces
                for &a in &edge_nodes(ie.structure_edge) {
                    for &b in &edge_nodes(ie.fluid_edge) {
                        out.push((cs[a], comp, cf[b], w * ns[a] * nf[b] * n));
                    }
                }
            }
        }
    }
    out
}

/// Reference coupling of conforming traces, integrated in the shared 1D
/// edge parameter without any inverse mapping.
pub fn conforming_entries(mesh_s: &Mesh, mesh_f: &Mesh, n_gp: usize) -> Result<Vec<(usize, usize, usize, f64)>> {
    let (seg, side) = shared_segment(&mesh_s.rect, &mesh_f.rect).ok_or_else(|| {
        Error::NonColinear(format!("rectangles {:?} and {:?} share no side", mesh_s.rect, mesh_f.rect))
    })?;
    let normal = side.opposite().outward_normal();
    let ts: Vec<_> = mesh_s.boundary(side).into_iter().filter(|t| t.hi > seg.lo && t.lo < seg.hi).collect();
    let tf: Vec<_> = mesh_f.boundary(side.opposite()).into_iter().filter(|t| t.hi > seg.lo && t.lo < seg.hi).collect();
    if ts.len() != tf.len() || ts.iter().zip(&tf).any(|(s, f)| s.lo != f.lo || s.hi != f.hi) {
        return Err(Error::Geometry("traces do not conform".into()));
    }
    let rule = gauss(n_gp);
    let mut out = Vec::new();
    for (s, f) in ts.iter().zip(&tf) {
        let cs = &mesh_s.elements[s.element];
        let cf = &mesh_f.elements[f.element];
        let es = edge_nodes(side);
        let ef = edge_nodes(side.opposite());
        let jac = 0.5 * (s.hi - s.lo);
        for &(t, w) in &rule {
            let l = element::lagrange1(t);
            for comp in 0..2 {
                if normal[comp] == 0.0 {
                    continue;
                }
                for ka in 0..3 {
                    for kb in 0..3 {
                        out.push((cs[es[ka]], comp, cf[ef[kb]], w * jac * l[ka] * l[kb] * normal[comp]));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Local entries as a sparse matrix with rows `2 · node + component`.
pub fn entry_matrix(entries: &[(usize, usize, usize, f64)], n_s: usize, n_f: usize) -> CsrMatrix<f64> {
    CsrMatrix::from_triplets(
        2 * n_s,
        n_f,
        entries.iter().map(|&(a, c, b, v)| (2 * a + c, b, v)).collect(),
    )
}

/// Global coupling block `C` (structure rows, fluid columns), without density.
#[derive(Clone, Debug)]
pub struct CouplingMatrix {
    pub structure: usize,
    pub fluid: usize,
    pub matrix: CsrMatrix<f64>,
}

pub fn assemble_coupling(
    itf: &MortarInterface,
    disc: &Discretisation,
    structure: usize,
    fluid: usize,
) -> CouplingMatrix {
    let ms = &disc.meshes[structure];
    let mf = &disc.meshes[fluid];
    let triplets = coupling_entries(itf, ms, mf)
        .into_iter()
        .map(|(a, c, b, v)| (disc.node_dof[structure][a] + c, disc.node_dof[fluid][b], v))
        .collect();
    CouplingMatrix { structure, fluid, matrix: CsrMatrix::from_triplets(disc.ndof, disc.ndof, triplets) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Rect;
    use crate::mesh::generate_mesh;

    fn pair(hs: f64, hf: f64) -> (Mesh, Mesh) {
        let s = generate_mesh(&Rect::new(0.0, 0.0, 1.0, 0.1), [hs, 0.1]).unwrap();
        let f = generate_mesh(&Rect::new(0.0, 0.1, 1.0, 1.0), [hf, 0.3]).unwrap();
        (s, f)
    }

    #[test]
    fn interface_element_counts() {
        let (s, f) = pair(0.5, 0.5);
        assert_eq!(detect_interfaces(&s, &f, 3).unwrap().elements.len(), 2);
        let (s, f) = pair(0.5, 1.0);
        assert_eq!(detect_interfaces(&s, &f, 3).unwrap().elements.len(), 2);
        let (s, f) = pair(0.5, 1.0 / 3.0);
        let itf = detect_interfaces(&s, &f, 3).unwrap();
        assert_eq!(itf.elements.len(), 4);
        let breaks: Vec<f64> = itf.elements.iter().skip(1).map(|e| e.a[0]).collect();
        for (b, e) in breaks.iter().zip([1.0 / 3.0, 0.5, 2.0 / 3.0]) {
            assert!((b - e).abs() < 1e-15);
        }
        assert_eq!(itf.normal, [0.0, -1.0]);
    }

    #[test]
    fn weights_sum_to_length() {
        let (s, f) = pair(0.2, 0.3);
        for ie in detect_interfaces(&s, &f, 3).unwrap().elements {
            let sum: f64 = ie.points.iter().map(|p| p.weight * ie.jacobian).sum();
            assert!((sum - ie.length()).abs() < 1e-12 * ie.length());
        }
    }

    #[test]
    fn disjoint_rectangles_are_rejected() {
        let s = generate_mesh(&Rect::new(0.0, 0.0, 1.0, 0.1), [0.5, 0.1]).unwrap();
        let f = generate_mesh(&Rect::new(0.0, 0.2, 1.0, 1.0), [0.5, 0.5]).unwrap();
        assert!(matches!(detect_interfaces(&s, &f, 3), Err(Error::NonColinear(_))));
    }
}
