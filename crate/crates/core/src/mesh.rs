//! Structured quadratic meshes, the supports-per-wavelength criterion, the
//! frequency-dependent mesh schedule and global DoF numbering.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::config::{frequency_grid, shared_segment, Coupling, DomainKind, Edge, MaterialRef, ModelConfig, Rect};
use crate::element::{self, ElementGeometry};
use crate::error::{Error, Result};
use crate::materials;
use crate::math::{self, C64};

/// Minimum nodes per wavelength required of every mesh.
pub const SUPPORTS_REQUIRED: f64 = 10.0;

/// One element edge on a rectangle side, spanning `[lo, hi]` along it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeTrace {
    pub element: usize,
    pub edge: Edge,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
    /// exact element sizes after rounding the counts
    pub hx: f64,
    pub hy: f64,
    pub nodes: Vec<[f64; 2]>,
    pub elements: Vec<[usize; 9]>,
}

/// Element count along an extent: `max(1, round(extent / h))`.
pub fn element_count(extent: f64, h: f64) -> usize {
    (math::round(extent / h) as usize).max(1)
}

/// Structured grid of 9-node quadrilaterals on a rectangle.
pub fn generate_mesh(rect: &Rect, size: [f64; 2]) -> Result<Mesh> {
    if !(rect.width() > crate::config::GEOM_TOL && rect.height() > crate::config::GEOM_TOL) {
        return Err(Error::Geometry(format!("degenerate rectangle {rect:?}")));
    }
    if !(size[0] > 0.0 && size[1] > 0.0) {
        return Err(Error::Geometry(format!("non-positive element size {size:?}")));
    }
    let nx = element_count(rect.width(), size[0]);
    let ny = element_count(rect.height(), size[1]);
    let hx = rect.width() / nx as f64;
    let hy = rect.height() / ny as f64;
    let coords = |n: usize, a: f64, b: f64| -> Vec<f64> {
        let corners: Vec<f64> = (0..=n)
            .map(|i| if i == n { b } else { a + (b - a) * (i as f64) / (n as f64) })
            .collect();
        let mut c = Vec::with_capacity(2 * n + 1);
        for i in 0..n {
            c.push(corners[i]);
            c.push(0.5 * (corners[i] + corners[i + 1]));
        }
        c.push(corners[n]);
        c
    };
    let xs = coords(nx, rect.x0, rect.x1);
    let ys = coords(ny, rect.y0, rect.y1);
    let row = 2 * nx + 1;
    let mut nodes = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            nodes.push([x, y]);
        }
    }
    let mut elements = Vec::with_capacity(nx * ny);
    for ey in 0..ny {
        for ex in 0..nx {
            let (i, j) = (2 * ex, 2 * ey);
            let id = |di: usize, dj: usize| (j + dj) * row + i + di;
            elements.push([
                id(0, 0),
                id(2, 0),
                id(2, 2),
                id(0, 2),
                id(1, 0),
                id(2, 1),
                id(1, 2),
                id(0, 1),
                id(1, 1),
            ]);
        }
    }
    Ok(Mesh { rect: *rect, nx, ny, hx, hy, nodes, elements })
}

impl Mesh {
    pub fn geometry(&self, e: usize) -> ElementGeometry {
        let mut nodes = [[0.0; 2]; 9];
        for (k, &n) in self.elements[e].iter().enumerate() {
            nodes[k] = self.nodes[n];
        }
        ElementGeometry { nodes }
    }

    /// Element edges on one side of the rectangle, ordered by increasing coordinate.
    pub fn boundary(&self, side: Edge) -> Vec<EdgeTrace> {
        let (nx, ny) = (self.nx, self.ny);
        let r = &self.rect;
        let xs = |i: usize| if i == nx { r.x1 } else { r.x0 + r.width() * i as f64 / nx as f64 };
        let ys = |j: usize| if j == ny { r.y1 } else { r.y0 + r.height() * j as f64 / ny as f64 };
        match side {
            Edge::South => (0..nx).map(|i| EdgeTrace { element: i, edge: side, lo: xs(i), hi: xs(i + 1) }).collect(),
            Edge::North => (0..nx)
                .map(|i| EdgeTrace { element: (ny - 1) * nx + i, edge: side, lo: xs(i), hi: xs(i + 1) })
                .collect(),
            Edge::West => (0..ny).map(|j| EdgeTrace { element: j * nx, edge: side, lo: ys(j), hi: ys(j + 1) }).collect(),
            Edge::East => (0..ny)
                .map(|j| EdgeTrace { element: j * nx + nx - 1, edge: side, lo: ys(j), hi: ys(j + 1) })
                .collect(),
        }
    }

    /// Global node ids along one side, ordered by increasing coordinate.
    pub fn boundary_nodes(&self, side: Edge) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, t) in self.boundary(side).iter().enumerate() {
            let en = element::edge_nodes(side);
            let conn = &self.elements[t.element];
            if k == 0 {
                out.push(conn[en[0]]);
            }
            out.push(conn[en[1]]);
            out.push(conn[en[2]]);
        }
        out
    }

    /// Node closest to `p` (lowest id on ties).
    pub fn nearest_node(&self, p: [f64; 2]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, q) in self.nodes.iter().enumerate() {
            let d = (q[0] - p[0]) * (q[0] - p[0]) + (q[1] - p[1]) * (q[1] - p[1]);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }
}

/// Nodes per wavelength for quadratic elements, `2λ / max(hx, hy)`.
pub fn supports_per_wavelength(hx: f64, hy: f64, lambda: f64) -> f64 {
    2.0 * lambda / hx.max(hy)
}

/// Thickness used for the bending wavelength of an elastic domain: the
/// shorter side of its rectangle.
pub fn plate_thickness(rect: &Rect) -> f64 {
    rect.width().min(rect.height())
}

/// Effective speed of sound of a pressure domain at `f`.
pub fn fluid_speed(mat: MaterialRef<'_>, f: f64) -> Result<C64> {
    match mat {
        MaterialRef::Acoustic(m) => Ok(C64::new(m.speed_of_sound, 0.0)),
        MaterialRef::Jca(m) => Ok(materials::jca_effective(m, f)?.speed),
        MaterialRef::Elastic(_) => Err(Error::Domain("elastic material has no fluid speed".into())),
    }
}

/// Smallest wavelength carried by domain `d` at `f`.
pub fn domain_wavelength(cfg: &ModelConfig, d: usize, f: f64) -> Result<f64> {
    let dom = &cfg.domains[d];
    match cfg.material(dom) {
        MaterialRef::Elastic(m) => materials::bending_wavelength(m, plate_thickness(&dom.rect), f),
        other => materials::acoustic_wavelength(fluid_speed(other, f)?, f),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeshSchedule {
    /// Actual element sizes `[hx, hy]` per level and domain.
    pub levels: Vec<Vec<[f64; 2]>>,
    /// Level serving each frequency band.
    pub band_level: Vec<usize>,
    /// Per level, the last grid frequency at which it satisfies the
    /// criterion, if it fails somewhere inside the frequency range.
    pub f_switch: Vec<Option<f64>>,
}

fn level_sizes(cfg: &ModelConfig, level: usize) -> Vec<[f64; 2]> {
    cfg.domains
        .iter()
        .map(|d| {
            let [hx, hy] = d.levels[level];
            let nx = element_count(d.rect.width(), hx);
            let ny = element_count(d.rect.height(), hy);
            [d.rect.width() / nx as f64, d.rect.height() / ny as f64]
        })
        .collect()
}

/// Worst supports-per-wavelength ratio over all domains of a level at `f`.
pub fn level_supports(cfg: &ModelConfig, sizes: &[[f64; 2]], f: f64) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for (d, [hx, hy]) in sizes.iter().enumerate() {
        let lambda = domain_wavelength(cfg, d, f)?;
        worst = worst.min(supports_per_wavelength(*hx, *hy, lambda));
    }
    Ok(worst)
}

/// Assigns to every band the coarsest level meeting the criterion at the
/// band's upper frequency.
pub fn build_schedule(cfg: &ModelConfig) -> Result<MeshSchedule> {
    let nlev = cfg.level_count();
    let levels: Vec<Vec<[f64; 2]>> = (0..nlev).map(|l| level_sizes(cfg, l)).collect();
    let plan = &cfg.frequency;
    let finest = nlev - 1;
    if level_supports(cfg, &levels[finest], plan.f_max)? < SUPPORTS_REQUIRED {
        return Err(Error::Infeasible(format!(
            "finest level has {:.3} supports per wavelength at {} Hz",
            level_supports(cfg, &levels[finest], plan.f_max)?,
            plan.f_max
        )));
    }
    let mut band_level = Vec::with_capacity(plan.bands());
    for b in 0..plan.bands() {
        let (_, f_hi) = plan.band_range(b);
        let mut chosen = None;
        for (l, sizes) in levels.iter().enumerate() {
            if level_supports(cfg, sizes, f_hi)? >= SUPPORTS_REQUIRED {
                chosen = Some(l);
                break;
            }
        }
        band_level.push(chosen.expect("finest level is feasible"));
    }
    let grid = frequency_grid(plan);
    let mut f_switch = Vec::with_capacity(nlev);
    for sizes in &levels {
        let g = |f: f64| level_supports(cfg, sizes, f).map(|s| s - SUPPORTS_REQUIRED);
        if g(plan.f_max)? >= 0.0 {
            f_switch.push(None);
            continue;
        }
        if g(plan.f_min)? < 0.0 {
            f_switch.push(Some(plan.f_min - plan.delta_f));
            continue;
        }
        let (mut lo, mut hi) = (plan.f_min, plan.f_max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid)? >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-9 * hi {
                break;
            }
        }
        let mut k = grid.iter().rposition(|p| p.f <= lo).unwrap_or(0);
        // the bracket can stop just short of a grid point sitting exactly on the limit
        while k + 1 < grid.len() && g(grid[k + 1].f)? >= 0.0 {
            k += 1;
        }
        f_switch.push(Some(grid[k].f));
    }
    Ok(MeshSchedule { levels, band_level, f_switch })
}

/// Per-domain and total DoF counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofCount {
    pub per_domain: Vec<usize>,
    pub total: usize,
}

fn same_point(a: [f64; 2], b: [f64; 2]) -> bool {
    math::abs(a[0] - b[0]) <= 1e-12 && math::abs(a[1] - b[1]) <= 1e-12
}

/// For two meshes sharing a side, the pairs `(node of a, node of b)` that
/// coincide, if the traces conform on the whole shared segment.
pub fn conforming_pairs(a: &Mesh, b: &Mesh) -> Option<Vec<(usize, usize)>> {
    let (seg, side) = shared_segment(&a.rect, &b.rect)?;
    let inside = |p: [f64; 2]| {
        let t = if seg.horizontal { p[0] } else { p[1] };
        t >= seg.lo - 1e-12 && t <= seg.hi + 1e-12
    };
    let na: Vec<usize> = a.boundary_nodes(side).into_iter().filter(|&n| inside(a.nodes[n])).collect();
    let nb: Vec<usize> = b.boundary_nodes(side.opposite()).into_iter().filter(|&n| inside(b.nodes[n])).collect();
    if na.len() != nb.len() || na.len() < 3 {
        return None;
    }
    let first = a.nodes[na[0]];
    let last = a.nodes[*na.last().unwrap()];
    if !same_point(first, seg.point(seg.lo)) || !same_point(last, seg.point(seg.hi)) {
        return None;
    }
    let pairs: Vec<(usize, usize)> = na.into_iter().zip(nb).collect();
    if pairs.iter().all(|&(i, j)| same_point(a.nodes[i], b.nodes[j])) {
        Some(pairs)
    } else {
        None
    }
}

/// Counts unknowns; with `merge_conforming`, nodes of same-field domains on
/// conforming shared sides are counted once (by the earlier domain).
pub fn dof_count(meshes: &[(DomainKind, &Mesh)], merge_conforming: bool) -> DofCount {
    let mut per_domain = Vec::with_capacity(meshes.len());
    let mut shared: Vec<Vec<bool>> = meshes.iter().map(|(_, m)| vec![false; m.nodes.len()]).collect();
    if merge_conforming {
        for j in 0..meshes.len() {
            for i in 0..j {
                if meshes[i].0.is_structure() != meshes[j].0.is_structure() {
                    continue;
                }
                if let Some(pairs) = conforming_pairs(meshes[i].1, meshes[j].1) {
                    for (_, nj) in pairs {
                        shared[j][nj] = true;
                    }
                }
            }
        }
    }
    for (d, (kind, _)) in meshes.iter().enumerate() {
        let own = shared[d].iter().filter(|s| !**s).count();
        per_domain.push(own * kind.components());
    }
    let total = per_domain.iter().sum();
    DofCount { per_domain, total }
}

/// Meshes of all domains at one level plus the global DoF numbering.
#[derive(Clone, Debug)]
pub struct Discretisation {
    pub level: usize,
    pub kinds: Vec<DomainKind>,
    pub meshes: Vec<Mesh>,
    /// `node_dof[d][n]`: first global DoF of node `n` of domain `d`
    pub node_dof: Vec<Vec<usize>>,
    /// Global DoF range `[start, end)` owned by each domain.
    pub blocks: Vec<(usize, usize)>,
    pub ndof: usize,
}

impl Discretisation {
    /// Meshes every domain at `level` and numbers the unknowns domain by
    /// domain; nodes on `fixed` interfaces are shared and belong to the
    /// earlier domain.
    pub fn build(cfg: &ModelConfig, level: usize) -> Result<Self> {
        let n = cfg.domains.len();
        let mut meshes = Vec::with_capacity(n);
        for d in &cfg.domains {
            meshes.push(generate_mesh(&d.rect, d.levels[level])?);
        }
        let kinds: Vec<DomainKind> = cfg.domains.iter().map(|d| d.kind).collect();
        // alias[d][node] = (earlier domain, node) for merged nodes
        let mut alias: Vec<Vec<Option<(usize, usize)>>> = meshes.iter().map(|m| vec![None; m.nodes.len()]).collect();
        for itf in cfg.interfaces.iter().filter(|i| i.coupling == Coupling::Fixed) {
            let a = cfg.domain_index(&itf.left).unwrap();
            let b = cfg.domain_index(&itf.right).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let pairs = conforming_pairs(&meshes[lo], &meshes[hi]).ok_or_else(|| {
                Error::Geometry(format!(
                    "fixed interface {}-{} needs conforming meshes at level {level}",
                    itf.left, itf.right
                ))
            })?;
            for (nl, nh) in pairs {
                alias[hi][nh] = Some((lo, nl));
            }
        }
        let mut node_dof: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut blocks = Vec::with_capacity(n);
        let mut next = 0usize;
        for d in 0..n {
            let start = next;
            let c = kinds[d].components();
            let mut map = vec![0usize; meshes[d].nodes.len()];
            for (node, slot) in map.iter_mut().enumerate() {
                match alias[d][node] {
                    Some((e, m)) => {
                        // follow chains through earlier domains
                        let mut target = (e, m);
                        while let Some(t) = alias[target.0][target.1] {
                            target = t;
                        }
                        *slot = node_dof[target.0][target.1];
                    }
                    None => {
                        *slot = next;
                        next += c;
                    }
                }
            }
            node_dof.push(map);
            blocks.push((start, next));
        }
        Ok(Self { level, kinds, meshes, node_dof, blocks, ndof: next })
    }

    /// Global DoFs of an element in local element order.
    pub fn element_dofs(&self, d: usize, e: usize) -> Vec<usize> {
        let c = self.kinds[d].components();
        let mut out = Vec::with_capacity(9 * c);
        for &node in &self.meshes[d].elements[e] {
            let base = self.node_dof[d][node];
            for k in 0..c {
                out.push(base + k);
            }
        }
        out
    }

    /// Pressure DoFs of every node of a pressure domain.
    pub fn pressure_dofs(&self, d: usize) -> Vec<usize> {
        assert!(!self.kinds[d].is_structure());
        let mut v: Vec<usize> = self.node_dof[d].clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn dof_count(&self) -> DofCount {
        let per_domain: Vec<usize> = self.blocks.iter().map(|(a, b)| b - a).collect();
        DofCount { total: self.ndof, per_domain }
    }
}
