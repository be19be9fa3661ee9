//! Plain-text mesh dump and per-interface-element mortar CSV.
//!
//! Mesh format, one record per line:
//!
//! ```text
//! vibro-mesh 1
//! level <l> domains <d>
//! domain <id> <kind> nodes <n> elements <m> first_dof <k>
//! n <x> <y>                 (n lines, node ids count from 0)
//! e <n0> ... <n8>           (m lines; corners, mid-sides, centre)
//! boundary <south|east|north|west> <node ids along the edge>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use vibro_core::config::{DomainKind, Edge, ModelConfig};
use vibro_core::mesh::Discretisation;
use vibro_core::mortar::MortarInterface;

use crate::error::{Result, RunError};
use crate::output::write_rows;

fn edge_name(e: Edge) -> &'static str {
    match e {
        Edge::South => "south",
        Edge::East => "east",
        Edge::North => "north",
        Edge::West => "west",
    }
}

pub fn mesh_to_string(cfg: &ModelConfig, disc: &Discretisation) -> String {
    let mut out = String::from("vibro-mesh 1\n");
    let _ = writeln!(out, "level {} domains {}", disc.level, disc.meshes.len());
    for (d, mesh) in disc.meshes.iter().enumerate() {
        let kind = match disc.kinds[d] {
            DomainKind::Elastic => "elastic",
            DomainKind::EquivalentFluid => "equivalent_fluid",
            DomainKind::Acoustic => "acoustic",
        };
        let _ = writeln!(
            out,
            "domain {} {} nodes {} elements {} first_dof {}",
            cfg.domains[d].id,
            kind,
            mesh.nodes.len(),
            mesh.elements.len(),
            disc.blocks[d].0
        );
        for p in &mesh.nodes {
            let _ = writeln!(out, "n {} {}", p[0], p[1]);
        }
        for e in &mesh.elements {
            let ids: Vec<String> = e.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "e {}", ids.join(" "));
        }
        for side in Edge::ALL {
            let ids: Vec<String> = mesh.boundary_nodes(side).iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "boundary {} {}", edge_name(side), ids.join(" "));
        }
    }
    out
}

pub fn write_mesh(path: &Path, cfg: &ModelConfig, disc: &Discretisation) -> Result<()> {
    std::fs::write(path, mesh_to_string(cfg, disc)).map_err(|e| RunError::io(path, e))
}

/// One row per interface Gauss point: segment, parents and local coordinates.
pub fn write_mortar_debug(path: &Path, interfaces: &[(String, &MortarInterface)]) -> Result<()> {
    let mut rows = Vec::new();
    for (name, itf) in interfaces {
        for (k, ie) in itf.elements.iter().enumerate() {
            for (g, p) in ie.points.iter().enumerate() {
                rows.push(vec![
                    name.clone(),
                    k.to_string(),
                    format!("{}", ie.a[0]),
                    format!("{}", ie.a[1]),
                    format!("{}", ie.b[0]),
                    format!("{}", ie.b[1]),
                    ie.structure_element.to_string(),
                    edge_name(ie.structure_edge).into(),
                    ie.fluid_element.to_string(),
                    edge_name(ie.fluid_edge).into(),
                    g.to_string(),
                    format!("{}", p.x[0]),
                    format!("{}", p.x[1]),
                    format!("{}", p.weight),
                    format!("{}", ie.jacobian),
                    format!("{}", p.xi_e),
                    format!("{}", p.xi_s[0]),
                    format!("{}", p.xi_s[1]),
                    format!("{}", p.xi_f[0]),
                    format!("{}", p.xi_f[1]),
                ]);
            }
        }
    }
    write_rows(
        path,
        &[
            "interface", "element", "ax", "ay", "bx", "by", "structure_element", "structure_edge", "fluid_element",
            "fluid_edge", "gauss", "x", "y", "weight", "jacobian", "xi_e", "xi_s", "eta_s", "xi_f", "eta_f",
        ],
        rows,
    )
}
