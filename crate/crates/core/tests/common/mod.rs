#![allow(dead_code)]

use vibro_core::config::{
    Coupling, DomainKind, DomainSpec, Edge, FrequencyPlan, InterfaceSpec, LoadKind, LoadSpec, MaterialSpec,
    ModelConfig, MorSettings, Rect, SolverSettings,
};
use vibro_core::materials::{AcousticMaterial, Ambient, ElasticMaterial, JcaMaterial, LossFactorTable};

pub fn wool() -> JcaMaterial {
    JcaMaterial {
        id: "wool".into(),
        porosity: 0.98,
        flow_resistivity: 2.0e4,
        tortuosity: 1.0,
        viscous_length: 1.0e-4,
        thermal_length: 2.0e-4,
        frame_density: 16.0,
        ambient: Ambient::default(),
    }
}

pub fn foam() -> JcaMaterial {
    JcaMaterial {
        id: "foam".into(),
        porosity: 0.95,
        flow_resistivity: 8.0e3,
        tortuosity: 1.4,
        viscous_length: 8.0e-5,
        thermal_length: 2.5e-4,
        frame_density: 30.0,
        ambient: Ambient::default(),
    }
}

pub fn elastic(id: &str, e: f64, rho: f64) -> ElasticMaterial {
    ElasticMaterial {
        id: id.into(),
        youngs_modulus: e,
        poisson_ratio: 0.3,
        density: rho,
        thickness: 1.0,
        prestress: None,
        pressurisation: None,
    }
}

pub fn air() -> AcousticMaterial {
    AcousticMaterial { id: "air".into(), speed_of_sound: 343.0, density: 1.213 }
}

fn domain(id: &str, kind: DomainKind, rect: Rect, material: &str, damping: Option<&str>, levels: &[[f64; 2]]) -> DomainSpec {
    DomainSpec {
        id: id.into(),
        kind,
        rect,
        material: material.into(),
        damping: damping.map(Into::into),
        levels: levels.to_vec(),
        clamped: Vec::new(),
    }
}

fn fsi(left: &str, right: &str) -> InterfaceSpec {
    InterfaceSpec { left: left.into(), right: right.into(), coupling: Coupling::Fsi, conforming: false }
}

pub fn plan(f_min: f64, f_max: f64, delta_f: f64, edges: &[f64]) -> FrequencyPlan {
    FrequencyPlan { f_min, f_max, delta_f, band_edges: edges.to_vec() }
}

/// Skin, wool, lining and cabin stacked on a `width` m wide strip.
/// One mesh level; sizes are `[skin, wool, lining, cabin]`.
pub fn slice(width: f64, sizes: [[f64; 2]; 4]) -> ModelConfig {
    let mut skin = elastic("cfrp", 60e9, 1550.0);
    skin.pressurisation = Some(vibro_core::materials::Pressurisation { delta_p: 42524.0, radius: 1.37 });
    let lining = elastic("panel", 10e9, 600.0);
    ModelConfig {
        domains: vec![
            domain("skin", DomainKind::Elastic, Rect::new(0.0, 0.0, width, 0.003), "cfrp", Some("skin_loss"), &[sizes[0]]),
            domain("insulation", DomainKind::EquivalentFluid, Rect::new(0.0, 0.003, width, 0.103), "wool", None, &[sizes[1]]),
            domain("lining", DomainKind::Elastic, Rect::new(0.0, 0.103, width, 0.111), "panel", Some("lining_loss"), &[sizes[2]]),
            domain("cabin", DomainKind::Acoustic, Rect::new(0.0, 0.111, width, 0.611), "air", Some("cabin_loss"), &[sizes[3]]),
        ],
        materials: vec![
            MaterialSpec::Elastic(skin),
            MaterialSpec::Jca(wool()),
            MaterialSpec::Elastic(lining),
            MaterialSpec::Acoustic(air()),
        ],
        damping_tables: vec![
            LossFactorTable { id: "skin_loss".into(), samples: vec![[10.0, 0.02], [1000.0, 0.01]] },
            LossFactorTable::constant("lining_loss", 0.02),
            LossFactorTable::constant("cabin_loss", 0.03),
        ],
        interfaces: vec![fsi("skin", "insulation"), fsi("insulation", "lining"), fsi("lining", "cabin")],
        load: LoadSpec {
            kind: LoadKind::PlaneWave,
            target: "skin".into(),
            edge: Edge::South,
            amplitude: 1.0,
            wave_speed: 396.0,
            direction: 1,
        },
        frequency: plan(20.0, 400.0, 2.0, &[20.0, 400.0]),
        solver: SolverSettings::default(),
        mor: MorSettings::default(),
    }
}

/// Small slice for quick assembly and solver tests (a few hundred DoFs).
pub fn small_slice() -> ModelConfig {
    slice(0.6, [[0.05, 0.003], [0.06, 0.05], [0.05, 0.008], [0.1, 0.1]])
}

/// A rigid-walled `lx × ly` air cavity with an uncoupled skin below it,
/// which only carries the load.
pub fn cavity(lx: f64, ly: f64, h: f64) -> ModelConfig {
    ModelConfig {
        domains: vec![
            domain("skin", DomainKind::Elastic, Rect::new(0.0, -0.003, lx, 0.0), "al", None, &[[h, 0.003]]),
            domain("cabin", DomainKind::Acoustic, Rect::new(0.0, 0.0, lx, ly), "air", None, &[[h, h]]),
        ],
        materials: vec![MaterialSpec::Elastic(elastic("al", 70e9, 2700.0)), MaterialSpec::Acoustic(air())],
        damping_tables: vec![],
        interfaces: vec![],
        load: LoadSpec {
            kind: LoadKind::PlaneWave,
            target: "skin".into(),
            edge: Edge::South,
            amplitude: 1.0,
            wave_speed: 343.0,
            direction: 1,
        },
        frequency: plan(10.0, 500.0, 10.0, &[10.0, 500.0]),
        solver: SolverSettings::default(),
        mor: MorSettings::default(),
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
