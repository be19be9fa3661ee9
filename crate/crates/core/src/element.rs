//! Nine-node Lagrange quadrilaterals: shape functions, quadrature, the
//! isoparametric map with its Newton inverse, and element matrices.
//!
//! Local node order: corners `0..4` counter-clockwise from `(−1, −1)`,
//! mid-sides `4: (0, −1)`, `5: (1, 0)`, `6: (0, 1)`, `7: (−1, 0)`, centre `8`.
//! Elastic element DoFs are ordered `[u_x0, u_y0, u_x1, u_y1, …]`.

use alloc::vec::Vec;

use crate::config::Edge;
use crate::error::{Error, Result};
use crate::math::{self, C64};

/// Tensor indices `(a, b)` of each node in the 1D quadratic basis on `{−1, 0, 1}`.
const TENSOR: [(usize, usize); 9] = [(0, 0), (2, 0), (2, 2), (0, 2), (1, 0), (2, 1), (1, 2), (0, 1), (1, 1)];

/// Reference coordinates of the nodes.
pub const NODE_REF: [[f64; 2]; 9] = [
    [-1.0, -1.0],
    [1.0, -1.0],
    [1.0, 1.0],
    [-1.0, 1.0],
    [0.0, -1.0],
    [1.0, 0.0],
    [0.0, 1.0],
    [-1.0, 0.0],
    [0.0, 0.0],
];

/// Local nodes on each edge, ordered by increasing edge parameter.
pub fn edge_nodes(e: Edge) -> [usize; 3] {
    match e {
        Edge::South => [0, 4, 1],
        Edge::East => [1, 5, 2],
        Edge::North => [3, 6, 2],
        Edge::West => [0, 7, 3],
    }
}

/// Reference point on edge `e` at parameter `t ∈ [−1, 1]`.
pub fn edge_point(e: Edge, t: f64) -> [f64; 2] {
    match e {
        Edge::South => [t, -1.0],
        Edge::East => [1.0, t],
        Edge::North => [t, 1.0],
        Edge::West => [-1.0, t],
    }
}

#[inline]
pub fn lagrange1(t: f64) -> [f64; 3] {
    [0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)]
}

#[inline]
pub fn lagrange1_deriv(t: f64) -> [f64; 3] {
    [t - 0.5, -2.0 * t, t + 0.5]
}

pub fn shape(xi: f64, eta: f64) -> [f64; 9] {
    let (lx, ly) = (lagrange1(xi), lagrange1(eta));
    let mut n = [0.0; 9];
    for (k, &(a, b)) in TENSOR.iter().enumerate() {
        n[k] = lx[a] * ly[b];
    }
    n
}

/// Derivatives `(∂N/∂ξ, ∂N/∂η)`.
pub fn shape_deriv(xi: f64, eta: f64) -> ([f64; 9], [f64; 9]) {
    let (lx, ly) = (lagrange1(xi), lagrange1(eta));
    let (dx, dy) = (lagrange1_deriv(xi), lagrange1_deriv(eta));
    let mut nx = [0.0; 9];
    let mut ny = [0.0; 9];
    for (k, &(a, b)) in TENSOR.iter().enumerate() {
        nx[k] = dx[a] * ly[b];
        ny[k] = lx[a] * dy[b];
    }
    (nx, ny)
}

/// Gauss–Legendre points and weights on `[−1, 1]` for 1, 2, 3 or 5 points.
pub fn gauss(n: usize) -> Vec<(f64, f64)> {
    match n {
        1 => alloc::vec![(0.0, 2.0)],
        2 => {
            let a = 1.0 / math::sqrt(3.0);
            alloc::vec![(-a, 1.0), (a, 1.0)]
        }
        3 => {
            let a = math::sqrt(0.6);
            alloc::vec![(-a, 5.0 / 9.0), (0.0, 8.0 / 9.0), (a, 5.0 / 9.0)]
        }
        5 => {
            let s = 2.0 * math::sqrt(10.0 / 7.0);
            let a = math::sqrt(5.0 - s) / 3.0;
            let b = math::sqrt(5.0 + s) / 3.0;
            let r = 13.0 * math::sqrt(70.0);
            let wa = (322.0 + r) / 900.0;
            let wb = (322.0 - r) / 900.0;
            alloc::vec![(-b, wb), (-a, wa), (0.0, 128.0 / 225.0), (a, wa), (b, wb)]
        }
        _ => panic!("no {n}-point Gauss rule"),
    }
}

/// Physical geometry of one element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementGeometry {
    pub nodes: [[f64; 2]; 9],
}

/// Shape values, physical gradients and `det J · w` at one quadrature point.
pub struct QuadPoint {
    pub n: [f64; 9],
    pub dx: [f64; 9],
    pub dy: [f64; 9],
    pub weight: f64,
}

impl ElementGeometry {
    pub fn map(&self, xi: f64, eta: f64) -> [f64; 2] {
        let n = shape(xi, eta);
        let mut p = [0.0; 2];
        for k in 0..9 {
            p[0] += n[k] * self.nodes[k][0];
            p[1] += n[k] * self.nodes[k][1];
        }
        p
    }

    /// `[[∂x/∂ξ, ∂x/∂η], [∂y/∂ξ, ∂y/∂η]]`
    pub fn jacobian(&self, xi: f64, eta: f64) -> [[f64; 2]; 2] {
        let (nx, ny) = shape_deriv(xi, eta);
        let mut j = [[0.0; 2]; 2];
        for k in 0..9 {
            j[0][0] += nx[k] * self.nodes[k][0];
            j[0][1] += ny[k] * self.nodes[k][0];
            j[1][0] += nx[k] * self.nodes[k][1];
            j[1][1] += ny[k] * self.nodes[k][1];
        }
        j
    }

    pub fn det_jacobian(&self, xi: f64, eta: f64) -> f64 {
        let j = self.jacobian(xi, eta);
        j[0][0] * j[1][1] - j[0][1] * j[1][0]
    }

    /// Tensor-product Gauss quadrature points with physical gradients.
    pub fn quadrature(&self, order: usize, element: usize) -> Result<Vec<QuadPoint>> {
        let g = gauss(order);
        let mut out = Vec::with_capacity(g.len() * g.len());
        for &(eta, wy) in &g {
            for &(xi, wx) in &g {
                let n = shape(xi, eta);
                let (nxi, neta) = shape_deriv(xi, eta);
                let j = self.jacobian(xi, eta);
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                if !(det > 0.0) {
                    return Err(Error::SingularJacobian { element });
                }
                let mut dx = [0.0; 9];
                let mut dy = [0.0; 9];
                for k in 0..9 {
                    // J^{-T} [∂ξ; ∂η]
                    dx[k] = (j[1][1] * nxi[k] - j[1][0] * neta[k]) / det;
                    dy[k] = (-j[0][1] * nxi[k] + j[0][0] * neta[k]) / det;
                }
                out.push(QuadPoint { n, dx, dy, weight: det * wx * wy });
            }
        }
        Ok(out)
    }

    pub fn bounding_box(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for p in &self.nodes {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].min(p[1]);
            b[2] = b[2].max(p[0]);
            b[3] = b[3].max(p[1]);
        }
        b
    }

    /// Local coordinates of the physical point `x` by Newton iteration on
    /// the quadratic map, starting from the element centre.
    pub fn inverse_map(&self, x: [f64; 2], element: usize) -> Result<[f64; 2]> {
        let fail = || Error::InverseMap { element, x: x[0], y: x[1] };
        let b = self.bounding_box();
        // curved edges can bulge past their nodes by up to a quarter of
        // the node spread
        let pad = 0.25 * (b[2] - b[0]).max(b[3] - b[1]) + 1e-9;
        if x[0] < b[0] - pad || x[0] > b[2] + pad || x[1] < b[1] - pad || x[1] > b[3] + pad {
            return Err(fail());
        }
        let mut r = [0.0f64, 0.0f64];
        let mut converged = false;
        for _ in 0..25 {
            let p = self.map(r[0], r[1]);
            let fx = p[0] - x[0];
            let fy = p[1] - x[1];
            if math::sqrt(fx * fx + fy * fy) < 1e-12 {
                converged = true;
                break;
            }
            let j = self.jacobian(r[0], r[1]);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                return Err(fail());
            }
            r[0] -= (j[1][1] * fx - j[0][1] * fy) / det;
            r[1] -= (-j[1][0] * fx + j[0][0] * fy) / det;
        }
        if !converged {
            let p = self.map(r[0], r[1]);
            if math::sqrt((p[0] - x[0]) * (p[0] - x[0]) + (p[1] - x[1]) * (p[1] - x[1])) >= 1e-12 {
                return Err(fail());
            }
        }
        let lim = 1.0 + 1e-10;
        if math::abs(r[0]) > lim || math::abs(r[1]) > lim {
            return Err(fail());
        }
        Ok(r)
    }
}

pub type Mat18 = [[f64; 18]; 18];
pub type Mat9 = [[f64; 9]; 9];

/// Plane-stress stiffness `t ∫ Bᵀ D B` of an elastic element (undamped).
pub fn elastic_stiffness(g: &ElementGeometry, e: f64, nu: f64, t: f64, element: usize) -> Result<Mat18> {
    let c = e / (1.0 - nu * nu);
    let d = [[c, c * nu, 0.0], [c * nu, c, 0.0], [0.0, 0.0, c * (1.0 - nu) / 2.0]];
    let mut k = [[0.0; 18]; 18];
    for q in g.quadrature(3, element)? {
        // B columns for node a: [dx 0; 0 dy; dy dx]
        let mut b = [[0.0; 18]; 3];
        for a in 0..9 {
            b[0][2 * a] = q.dx[a];
            b[1][2 * a + 1] = q.dy[a];
            b[2][2 * a] = q.dy[a];
            b[2][2 * a + 1] = q.dx[a];
        }
        let mut db = [[0.0; 18]; 3];
        for i in 0..3 {
            for j in 0..18 {
                db[i][j] = d[i][0] * b[0][j] + d[i][1] * b[1][j] + d[i][2] * b[2][j];
            }
        }
        let w = q.weight * t;
        for i in 0..18 {
            for j in 0..18 {
                k[i][j] += w * (b[0][i] * db[0][j] + b[1][i] * db[1][j] + b[2][i] * db[2][j]);
            }
        }
    }
    Ok(k)
}

/// Geometric stiffness of a membrane pre-stress `(σ_x, σ_y)`:
/// `t ∫ (σ_x N_a,x N_b,x + σ_y N_a,y N_b,y)` on both displacement components.
pub fn geometric_stiffness(g: &ElementGeometry, sx: f64, sy: f64, t: f64, element: usize) -> Result<Mat18> {
    let mut k = [[0.0; 18]; 18];
    if sx == 0.0 && sy == 0.0 {
        return Ok(k);
    }
    for q in g.quadrature(3, element)? {
        let w = q.weight * t;
        for a in 0..9 {
            for b in 0..9 {
                let v = w * (sx * q.dx[a] * q.dx[b] + sy * q.dy[a] * q.dy[b]);
                k[2 * a][2 * b] += v;
                k[2 * a + 1][2 * b + 1] += v;
            }
        }
    }
    Ok(k)
}

/// Consistent mass `ρ t ∫ Nᵀ N` on both displacement components.
pub fn elastic_mass(g: &ElementGeometry, rho: f64, t: f64, element: usize) -> Result<Mat18> {
    let s = scalar_mass(g, element)?;
    let mut m = [[0.0; 18]; 18];
    for a in 0..9 {
        for b in 0..9 {
            let v = rho * t * s[a][b];
            m[2 * a][2 * b] = v;
            m[2 * a + 1][2 * b + 1] = v;
        }
    }
    Ok(m)
}

/// `∫ ∇N_a · ∇N_b`
pub fn scalar_laplace(g: &ElementGeometry, element: usize) -> Result<Mat9> {
    let mut k = [[0.0; 9]; 9];
    for q in g.quadrature(3, element)? {
        for a in 0..9 {
            for b in 0..9 {
                k[a][b] += q.weight * (q.dx[a] * q.dx[b] + q.dy[a] * q.dy[b]);
            }
        }
    }
    Ok(k)
}

/// `∫ N_a N_b`
pub fn scalar_mass(g: &ElementGeometry, element: usize) -> Result<Mat9> {
    let mut m = [[0.0; 9]; 9];
    for q in g.quadrature(3, element)? {
        for a in 0..9 {
            for b in 0..9 {
                m[a][b] += q.weight * q.n[a] * q.n[b];
            }
        }
    }
    Ok(m)
}

/// Helmholtz element `Kₑ = s/ρ ∫∇N·∇N`, `Mₑ = 1/(ρc²) ∫NN` with loss scale `s`.
pub fn helmholtz_element(
    g: &ElementGeometry,
    rho: C64,
    c: C64,
    scale: C64,
    element: usize,
) -> Result<([[C64; 9]; 9], [[C64; 9]; 9])> {
    if rho == C64::new(0.0, 0.0) || c == C64::new(0.0, 0.0) {
        return Err(Error::Domain("zero density or speed of sound".into()));
    }
    let l = scalar_laplace(g, element)?;
    let m = scalar_mass(g, element)?;
    let ks = scale / rho;
    let ms = C64::new(1.0, 0.0) / (rho * c * c);
    let mut ke = [[C64::new(0.0, 0.0); 9]; 9];
    let mut me = [[C64::new(0.0, 0.0); 9]; 9];
    for a in 0..9 {
        for b in 0..9 {
            ke[a][b] = ks * l[a][b];
            me[a][b] = ms * m[a][b];
        }
    }
    Ok((ke, me))
}

/// Elastic element `(Kₑ, Mₑ)` with loss scale applied to the elastic part;
/// the geometric stiffness is added undamped.
pub fn elastic_element(
    g: &ElementGeometry,
    mat: &crate::materials::ElasticMaterial,
    scale: C64,
    stress: (f64, f64),
    element: usize,
) -> Result<(Vec<C64>, Mat18)> {
    let ke = elastic_stiffness(g, mat.youngs_modulus, mat.poisson_ratio, mat.thickness, element)?;
    let kg = geometric_stiffness(g, stress.0, stress.1, mat.thickness, element)?;
    let me = elastic_mass(g, mat.density, mat.thickness, element)?;
    let mut k = Vec::with_capacity(324);
    for i in 0..18 {
        for j in 0..18 {
            k.push(scale * ke[i][j] + kg[i][j]);
        }
    }
    Ok((k, me))
}

/// Straight-sided element on `[x0, x1] × [y0, y1]` with exact mid-nodes.
pub fn rect_element(x0: f64, y0: f64, x1: f64, y1: f64) -> ElementGeometry {
    let mut nodes = [[0.0; 2]; 9];
    for (k, r) in NODE_REF.iter().enumerate() {
        let x = match r[0] as i32 {
            -1 => x0,
            0 => 0.5 * (x0 + x1),
            _ => x1,
        };
        let y = match r[1] as i32 {
            -1 => y0,
            0 => 0.5 * (y0 + y1),
            _ => y1,
        };
        nodes[k] = [x, y];
    }
    ElementGeometry { nodes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_functions_are_nodal_and_sum_to_one() {
        for (k, r) in NODE_REF.iter().enumerate() {
            let n = shape(r[0], r[1]);
            for (j, v) in n.iter().enumerate() {
                assert!((v - if j == k { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let n = shape(0.3, -0.7);
        assert!((n.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let (dx, dy) = shape_deriv(0.3, -0.7);
        assert!(dx.iter().sum::<f64>().abs() < 1e-14 && dy.iter().sum::<f64>().abs() < 1e-14);
    }

    #[test]
    fn gauss_rules_integrate_polynomials() {
        for n in [1, 2, 3, 5] {
            let g = gauss(n);
            let deg = 2 * n - 1;
            for p in 0..=deg {
                let num: f64 = g.iter().map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((num - exact).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn inverse_map_of_nodes_and_centroid() {
        let g = rect_element(0.0, 0.0, 2.0, 1.0);
        for (k, r) in NODE_REF.iter().enumerate() {
            let xi = g.inverse_map(g.nodes[k], 0).unwrap();
            assert!((xi[0] - r[0]).abs() < 1e-12 && (xi[1] - r[1]).abs() < 1e-12);
        }
        let c = g.inverse_map([1.0, 0.5], 0).unwrap();
        assert!(c[0].abs() < 1e-14 && c[1].abs() < 1e-14);
        assert!(matches!(g.inverse_map([3.0, 0.5], 7), Err(Error::InverseMap { element: 7, .. })));
    }

    #[test]
    fn laplace_rows_sum_to_zero() {
        let g = rect_element(0.0, 0.0, 1.0, 1.0);
        let k = scalar_laplace(&g, 0).unwrap();
        for row in &k {
            assert!(row.iter().sum::<f64>().abs() < 1e-14);
        }
        let m = scalar_mass(&g, 0).unwrap();
        let total: f64 = m.iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn helmholtz_speed_scaling() {
        let g = rect_element(0.0, 0.0, 1.0, 1.0);
        let one = C64::new(1.0, 0.0);
        let (k1, m1) = helmholtz_element(&g, C64::new(1.2, 0.0), C64::new(343.0, 0.0), one, 0).unwrap();
        let (k2, m2) = helmholtz_element(&g, C64::new(1.2, 0.0), C64::new(686.0, 0.0), one, 0).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(k1[a][b], k2[a][b]);
                assert!((m1[a][b] - 4.0 * m2[a][b]).norm() < 1e-15 * m1[a][b].norm().max(1e-300));
            }
        }
    }

    #[test]
    fn negative_jacobian_is_rejected() {
        let g = rect_element(1.0, 0.0, 0.0, 1.0);
        assert!(matches!(scalar_mass(&g, 3), Err(Error::SingularJacobian { element: 3 })));
    }
}
