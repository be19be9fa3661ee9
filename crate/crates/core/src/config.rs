//! Declarative model description and its validation.
//!
//! The types are plain serde structs; the companion crate reads and writes
//! them as TOML. Unknown keys are rejected everywhere.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::{AcousticMaterial, ElasticMaterial, JcaMaterial, LossFactorTable};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Elastic,
    EquivalentFluid,
    Acoustic,
}

impl DomainKind {
    pub fn is_structure(self) -> bool {
        self == DomainKind::Elastic
    }

    /// Unknowns per node: two displacement components or one pressure.
    pub fn components(self) -> usize {
        if self.is_structure() {
            2
        } else {
            1
        }
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`, metres.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn overlaps(&self, o: &Rect) -> bool {
        self.x0 < o.x1 && o.x0 < self.x1 && self.y0 < o.y1 && o.y0 < self.y1
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }

    pub fn edge(&self, e: Edge) -> Segment {
        match e {
            Edge::South => Segment::horizontal(self.y0, self.x0, self.x1),
            Edge::North => Segment::horizontal(self.y1, self.x0, self.x1),
            Edge::West => Segment::vertical(self.x0, self.y0, self.y1),
            Edge::East => Segment::vertical(self.x1, self.y0, self.y1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edge {
    South,
    East,
    North,
    West,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::South, Edge::East, Edge::North, Edge::West];

    pub fn is_horizontal(self) -> bool {
        matches!(self, Edge::South | Edge::North)
    }

    /// Outward unit normal of a rectangle on this edge.
    pub fn outward_normal(self) -> [f64; 2] {
        match self {
            Edge::South => [0.0, -1.0],
            Edge::East => [1.0, 0.0],
            Edge::North => [0.0, 1.0],
            Edge::West => [-1.0, 0.0],
        }
    }

    pub fn opposite(self) -> Edge {
        match self {
            Edge::South => Edge::North,
            Edge::North => Edge::South,
            Edge::East => Edge::West,
            Edge::West => Edge::East,
        }
    }
}

/// Axis-aligned segment at fixed `level` spanning `[lo, hi]` along the axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub horizontal: bool,
    pub level: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Segment {
    pub fn horizontal(y: f64, x0: f64, x1: f64) -> Self {
        Self { horizontal: true, level: y, lo: x0, hi: x1 }
    }

    pub fn vertical(x: f64, y0: f64, y1: f64) -> Self {
        Self { horizontal: false, level: x, lo: y0, hi: y1 }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn point(&self, t: f64) -> [f64; 2] {
        if self.horizontal {
            [t, self.level]
        } else {
            [self.level, t]
        }
    }
}

/// Length below which geometric quantities are treated as zero, m.
pub const GEOM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub id: String,
    pub kind: DomainKind,
    pub rect: Rect,
    pub material: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<String>,
    /// Element sizes `[hx, hy]` per mesh level, coarse to fine.
    pub levels: Vec<[f64; 2]>,
    /// Edges of an elastic domain held at zero displacement.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clamped: Vec<Edge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaterialSpec {
    Elastic(ElasticMaterial),
    Acoustic(AcousticMaterial),
    Jca(JcaMaterial),
}

impl MaterialSpec {
    pub fn id(&self) -> &str {
        match self {
            MaterialSpec::Elastic(m) => &m.id,
            MaterialSpec::Acoustic(m) => &m.id,
            MaterialSpec::Jca(m) => &m.id,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            MaterialSpec::Elastic(m) => m.validate(),
            MaterialSpec::Acoustic(m) => m.validate(),
            MaterialSpec::Jca(m) => m.validate(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    Fsi,
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceSpec {
    pub left: String,
    pub right: String,
    pub coupling: Coupling,
    /// Hint only; conformity is checked on the generated meshes.
    #[serde(default)]
    pub conforming: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadKind {
    PlaneWave,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSpec {
    pub kind: LoadKind,
    pub target: String,
    pub edge: Edge,
    /// Pa
    pub amplitude: f64,
    /// phase speed along the edge, m/s
    pub wave_speed: f64,
    /// +1 travels towards increasing coordinate, −1 the other way
    pub direction: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyPlan {
    pub f_min: f64,
    pub f_max: f64,
    pub delta_f: f64,
    pub band_edges: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverMethod {
    Direct,
    Bjacobi,
    Gasm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchwarzVariant {
    Restricted,
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    #[serde(default = "default_method")]
    pub method: SolverMethod,
    /// Domain-id groups forming the subdomains; empty means one group per domain.
    #[serde(default)]
    pub groups: Vec<Vec<String>>,
    #[serde(default = "default_overlap")]
    pub overlap: usize,
    #[serde(default = "default_variant")]
    pub variant: SchwarzVariant,
    #[serde(default = "default_atol")]
    pub atol: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_max_it")]
    pub max_it: usize,
    #[serde(default = "default_restart")]
    pub restart: usize,
    #[serde(default = "default_true")]
    pub diagonal_scale: bool,
    #[serde(default = "default_true")]
    pub warm_start: bool,
    /// FRF probe point, m; defaults to the centre of the SPL domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<[f64; 2]>,
    /// Domain whose nodes define the mean SPL; defaults to the last acoustic domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spl_domain: Option<String>,
}

fn default_method() -> SolverMethod {
    SolverMethod::Direct
}
fn default_overlap() -> usize {
    1
}
fn default_variant() -> SchwarzVariant {
    SchwarzVariant::Restricted
}
fn default_atol() -> f64 {
    1e-4
}
fn default_rtol() -> f64 {
    1e-5
}
fn default_max_it() -> usize {
    150
}
fn default_restart() -> usize {
    1000
}
fn default_true() -> bool {
    true
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            method: default_method(),
            groups: Vec::new(),
            overlap: default_overlap(),
            variant: default_variant(),
            atol: default_atol(),
            rtol: default_rtol(),
            max_it: default_max_it(),
            restart: default_restart(),
            diagonal_scale: true,
            warm_start: true,
            probe: None,
            spl_domain: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorSettings {
    #[serde(default = "default_mor_tol")]
    pub tol: f64,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
    #[serde(default = "default_moments")]
    pub moments_per_point: usize,
    /// Every `candidate_stride`-th grid frequency is a greedy candidate.
    #[serde(default = "default_stride")]
    pub candidate_stride: usize,
    /// Explicit windows `[f_lo, f_hi]` in Hz; absent means automatic splitting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windows: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub second_order: bool,
    /// Optional post-hoc Rayleigh damping `[alpha, beta]` of the reduced model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rayleigh: Option<[f64; 2]>,
}

fn default_mor_tol() -> f64 {
    1e-2
}
fn default_max_points() -> usize {
    12
}
fn default_moments() -> usize {
    4
}
fn default_stride() -> usize {
    4
}

impl Default for MorSettings {
    fn default() -> Self {
        Self {
            tol: default_mor_tol(),
            max_points: default_max_points(),
            moments_per_point: default_moments(),
            candidate_stride: default_stride(),
            windows: None,
            second_order: false,
            rayleigh: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub domains: Vec<DomainSpec>,
    pub materials: Vec<MaterialSpec>,
    #[serde(default)]
    pub damping_tables: Vec<LossFactorTable>,
    #[serde(default)]
    pub interfaces: Vec<InterfaceSpec>,
    pub load: LoadSpec,
    pub frequency: FrequencyPlan,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub mor: MorSettings,
}

/// Material of a domain, resolved from the table.
#[derive(Clone, Copy, Debug)]
pub enum MaterialRef<'a> {
    Elastic(&'a ElasticMaterial),
    Acoustic(&'a AcousticMaterial),
    Jca(&'a JcaMaterial),
}

fn verr<T>(msg: String) -> Result<T> {
    Err(Error::Validation(msg))
}

impl ModelConfig {
    pub fn domain_index(&self, id: &str) -> Option<usize> {
        self.domains.iter().position(|d| d.id == id)
    }

    pub fn domain(&self, id: &str) -> Option<&DomainSpec> {
        self.domains.iter().find(|d| d.id == id)
    }

    pub fn material(&self, domain: &DomainSpec) -> MaterialRef<'_> {
        match self.materials.iter().find(|m| m.id() == domain.material) {
            Some(MaterialSpec::Elastic(m)) => MaterialRef::Elastic(m),
            Some(MaterialSpec::Acoustic(m)) => MaterialRef::Acoustic(m),
            Some(MaterialSpec::Jca(m)) => MaterialRef::Jca(m),
            None => panic!("material {} not resolved; validate the config first", domain.material),
        }
    }

    pub fn damping(&self, domain: &DomainSpec) -> Option<&LossFactorTable> {
        domain.damping.as_ref().and_then(|id| self.damping_tables.iter().find(|t| &t.id == id))
    }

    pub fn level_count(&self) -> usize {
        self.domains.first().map_or(0, |d| d.levels.len())
    }

    /// Index of the domain used for SPL and ROM outputs.
    pub fn spl_domain(&self) -> Option<usize> {
        match &self.solver.spl_domain {
            Some(id) => self.domain_index(id),
            None => self.domains.iter().rposition(|d| d.kind == DomainKind::Acoustic),
        }
    }

    /// Subdomain groups as domain indices, one group per domain by default.
    pub fn groups(&self) -> Result<Vec<Vec<usize>>> {
        resolve_groups(self, &self.solver.groups)
    }

    /// Checks every invariant, reporting the first one violated.
    pub fn validate(&self) -> Result<()> {
        if self.domains.is_empty() {
            return verr("at least one domain is required".into());
        }
        let mut ids = BTreeSet::new();
        for d in &self.domains {
            if !ids.insert(d.id.as_str()) {
                return verr(format!("duplicate domain id {}", d.id));
            }
        }
        let mut mids = BTreeSet::new();
        for m in &self.materials {
            if !mids.insert(m.id()) {
                return verr(format!("duplicate material id {}", m.id()));
            }
            m.validate()?;
        }
        for t in &self.damping_tables {
            t.validate()?;
        }
        let nlev = self.level_count();
        for d in &self.domains {
            let r = &d.rect;
            if !(r.width() > GEOM_TOL && r.height() > GEOM_TOL) {
                return verr(format!("domain {}: degenerate rectangle", d.id));
            }
            if ![r.x0, r.y0, r.x1, r.y1].iter().all(|v| v.is_finite()) {
                return verr(format!("domain {}: non-finite coordinates", d.id));
            }
            let m = match self.materials.iter().find(|m| m.id() == d.material) {
                Some(m) => m,
                None => return verr(format!("domain {}: unknown material {}", d.id, d.material)),
            };
            let ok = matches!(
                (d.kind, m),
                (DomainKind::Elastic, MaterialSpec::Elastic(_))
                    | (DomainKind::Acoustic, MaterialSpec::Acoustic(_))
                    | (DomainKind::EquivalentFluid, MaterialSpec::Jca(_))
            );
            if !ok {
                return verr(format!("domain {}: material {} does not match kind", d.id, d.material));
            }
            if let Some(t) = &d.damping {
                if !self.damping_tables.iter().any(|x| &x.id == t) {
                    return verr(format!("domain {}: unknown damping table {t}", d.id));
                }
            }
            if !d.clamped.is_empty() && !d.kind.is_structure() {
                return verr(format!("domain {}: only elastic domains can be clamped", d.id));
            }
            if d.levels.is_empty() {
                return verr(format!("domain {}: at least one mesh level is required", d.id));
            }
            if d.levels.len() != nlev {
                return verr(format!("domain {}: every domain needs the same number of mesh levels", d.id));
            }
            if d.levels.iter().any(|[hx, hy]| !(*hx > 0.0 && *hy > 0.0)) {
                return verr(format!("domain {}: element sizes must be positive", d.id));
            }
        }
        for (i, a) in self.domains.iter().enumerate() {
            for b in &self.domains[i + 1..] {
                if a.rect.overlaps(&b.rect) {
                    return verr(format!("domains overlap: {} and {}", a.id, b.id));
                }
            }
        }
        for itf in &self.interfaces {
            self.validate_interface(itf)?;
        }
        self.validate_load()?;
        self.validate_frequency()?;
        self.validate_solver()?;
        self.validate_mor()?;
        Ok(())
    }

    fn validate_interface(&self, itf: &InterfaceSpec) -> Result<()> {
        let (l, r) = match (self.domain(&itf.left), self.domain(&itf.right)) {
            (Some(l), Some(r)) => (l, r),
            _ => return verr(format!("interface {}-{}: unknown domain", itf.left, itf.right)),
        };
        if l.id == r.id {
            return verr(format!("interface {}-{}: a domain cannot couple to itself", l.id, r.id));
        }
        match itf.coupling {
            Coupling::Fsi => {
                if l.kind.is_structure() == r.kind.is_structure() {
                    return verr(format!(
                        "interface {}-{}: fsi needs one elastic and one pressure domain",
                        l.id, r.id
                    ));
                }
            }
            Coupling::Fixed => {
                if !(l.kind.is_structure() && r.kind.is_structure()) {
                    return verr(format!("interface {}-{}: fixed needs two elastic domains", l.id, r.id));
                }
            }
        }
        if shared_segment(&l.rect, &r.rect).is_none() {
            return verr(format!("interface {}-{}: shared boundary has zero length", l.id, r.id));
        }
        Ok(())
    }

    fn validate_load(&self) -> Result<()> {
        let ld = &self.load;
        match self.domain(&ld.target) {
            Some(d) if d.kind.is_structure() => {}
            Some(_) => return verr(format!("load target {} is not elastic", ld.target)),
            None => return verr(format!("load target {} is unknown", ld.target)),
        }
        if !(ld.amplitude > 0.0) {
            return verr("load amplitude must be positive".into());
        }
        if !(ld.wave_speed > 0.0) {
            return verr("load wave_speed must be positive".into());
        }
        if ld.direction != 1 && ld.direction != -1 {
            return verr("load direction must be +1 or -1".into());
        }
        Ok(())
    }

    fn validate_frequency(&self) -> Result<()> {
        let p = &self.frequency;
        if !(p.f_min > 0.0) {
            return verr("f_min must be positive".into());
        }
        if !(p.delta_f > 0.0) {
            return verr("delta_f must be positive".into());
        }
        if !(p.f_max >= p.f_min) || !p.f_max.is_finite() {
            return verr("f_max must not be below f_min".into());
        }
        if p.band_edges.len() < 2 {
            return verr("band_edges needs at least two entries".into());
        }
        if p.band_edges[0] != p.f_min || *p.band_edges.last().unwrap() != p.f_max {
            return verr("band_edges must start at f_min and end at f_max".into());
        }
        if p.band_edges.windows(2).any(|w| !(w[0] < w[1])) && p.f_min != p.f_max {
            return verr("band_edges must be strictly ascending".into());
        }
        Ok(())
    }

    fn validate_solver(&self) -> Result<()> {
        let s = &self.solver;
        resolve_groups(self, &s.groups)?;
        if !(s.atol >= 0.0) || !(s.rtol >= 0.0) || (s.atol == 0.0 && s.rtol == 0.0) {
            return verr("solver tolerances must be non-negative and not both zero".into());
        }
        if s.max_it == 0 || s.restart == 0 {
            return verr("max_it and restart must be positive".into());
        }
        if let Some(id) = &s.spl_domain {
            match self.domain(id) {
                Some(d) if !d.kind.is_structure() => {}
                _ => return verr(format!("spl_domain {id} must be a pressure domain")),
            }
        }
        let spl = match self.spl_domain() {
            Some(i) => i,
            None => return verr("no acoustic domain for the SPL output".into()),
        };
        if let Some([x, y]) = s.probe {
            if !self.domains[spl].rect.contains(x, y) {
                return verr("probe lies outside the SPL domain".into());
            }
        }
        Ok(())
    }

    fn validate_mor(&self) -> Result<()> {
        let m = &self.mor;
        if !(m.tol > 0.0) {
            return verr("mor tol must be positive".into());
        }
        if m.moments_per_point == 0 || m.max_points == 0 || m.candidate_stride == 0 {
            return verr("mor moments_per_point, max_points and candidate_stride must be positive".into());
        }
        if let Some(w) = &m.windows {
            crate::mor::validate_windows(w, self.frequency.f_min, self.frequency.f_max)?;
        }
        Ok(())
    }
}

/// Resolves domain-id groups into a partition of domain indices.
pub fn resolve_groups(cfg: &ModelConfig, groups: &[Vec<String>]) -> Result<Vec<Vec<usize>>> {
    if groups.is_empty() {
        return Ok((0..cfg.domains.len()).map(|i| vec![i]).collect());
    }
    let mut seen = vec![false; cfg.domains.len()];
    let mut out = Vec::new();
    for g in groups {
        if g.is_empty() {
            return verr("empty domain group".into());
        }
        let mut idx = Vec::new();
        for id in g {
            let i = match cfg.domain_index(id) {
                Some(i) => i,
                None => return verr(format!("group references unknown domain {id}")),
            };
            if seen[i] {
                return verr(format!("domain {id} appears in more than one group"));
            }
            seen[i] = true;
            idx.push(i);
        }
        idx.sort_unstable();
        out.push(idx);
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return verr(format!("domain {} is in no group", cfg.domains[i].id));
    }
    Ok(out)
}

/// Segment shared by the boundaries of two rectangles with disjoint
/// interiors, if it has positive length.
pub fn shared_segment(a: &Rect, b: &Rect) -> Option<(Segment, Edge)> {
    for e in Edge::ALL {
        let sa = a.edge(e);
        let sb = b.edge(e.opposite());
        if math::abs(sa.level - sb.level) > GEOM_TOL {
            continue;
        }
        let lo = sa.lo.max(sb.lo);
        let hi = sa.hi.min(sb.hi);
        if hi - lo > GEOM_TOL {
            let s = Segment { horizontal: sa.horizontal, level: sa.level, lo, hi };
            return Some((s, e));
        }
    }
    None
}

/// One frequency of the sweep grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub f: f64,
    pub band: usize,
}

impl FrequencyPlan {
    /// Number of grid points, `floor((f_max − f_min) / Δf) + 1`. A relative
    /// slack of 1e-9 absorbs representation error in decimal step sizes.
    pub fn len(&self) -> usize {
        let q = (self.f_max - self.f_min) / self.delta_f;
        math::floor(q + 1e-9 * q.max(1.0)) as usize + 1
    }

    pub fn frequency(&self, k: usize) -> f64 {
        self.f_min + k as f64 * self.delta_f
    }

    pub fn bands(&self) -> usize {
        self.band_edges.len().saturating_sub(1).max(1)
    }

    /// Band of `f`: the first band contains `f_min`, the others are open
    /// below and closed above. Frequencies past the last edge map to the
    /// last band.
    pub fn band_of(&self, f: f64) -> usize {
        let nb = self.bands();
        for b in 0..nb {
            if f <= self.band_edges[b + 1] {
                return b;
            }
        }
        nb - 1
    }

    pub fn band_range(&self, b: usize) -> (f64, f64) {
        (self.band_edges[b], self.band_edges[b + 1])
    }
}

/// All grid frequencies with band tags.
pub fn frequency_grid(plan: &FrequencyPlan) -> Vec<GridPoint> {
    (0..plan.len())
        .map(|k| {
            let f = plan.frequency(k);
            GridPoint { index: k, f, band: plan.band_of(f) }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(f_min: f64, f_max: f64, delta_f: f64, edges: &[f64]) -> FrequencyPlan {
        FrequencyPlan { f_min, f_max, delta_f, band_edges: edges.to_vec() }
    }

    #[test]
    fn grid_of_the_benchmark() {
        let p = plan(10.0, 1000.0, 2.0, &[10.0, 258.0, 578.0, 1000.0]);
        let g = frequency_grid(&p);
        assert_eq!(g.len(), 496);
        assert_eq!(g[0].f, 10.0);
        assert_eq!(g[495].f, 1000.0);
        let band = |f: f64| g.iter().find(|x| x.f == f).unwrap().band;
        assert_eq!(band(10.0), 0);
        assert_eq!(band(258.0), 0);
        assert_eq!(band(260.0), 1);
        assert_eq!(band(578.0), 1);
        assert_eq!(band(580.0), 2);
        assert_eq!(band(1000.0), 2);
    }

    #[test]
    fn single_step_grid() {
        let p = plan(10.0, 10.0, 2.0, &[10.0, 10.0]);
        let g = frequency_grid(&p);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].band, 0);
    }

    #[test]
    fn decimal_steps_count_exactly() {
        assert_eq!(plan(0.7, 1.0, 0.1, &[0.7, 1.0]).len(), 4);
    }

    #[test]
    fn shared_segment_of_stacked_rects() {
        let a = Rect::new(0.0, 0.0, 1.0, 1.0);
        let b = Rect::new(0.5, 1.0, 2.0, 2.0);
        let (s, e) = shared_segment(&a, &b).unwrap();
        assert_eq!(e, Edge::North);
        assert_eq!((s.lo, s.hi, s.level), (0.5, 1.0, 1.0));
        let c = Rect::new(1.0, 1.0, 2.0, 2.0);
        assert!(shared_segment(&a, &c).is_none());
    }
}
