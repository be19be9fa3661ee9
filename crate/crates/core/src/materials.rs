//! Material laws: JCA equivalent fluid with limp-frame density, loss-factor
//! tables, membrane pre-stress from pressurisation and wavelength curves.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{self, C64, TAU};

/// Air properties used by the JCA model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ambient {
    /// kg/m³
    pub density: f64,
    /// m/s
    pub speed_of_sound: f64,
    /// dynamic viscosity, Pa·s
    pub viscosity: f64,
    pub prandtl: f64,
    /// ratio of specific heats
    pub gamma: f64,
    /// static pressure, Pa
    pub pressure: f64,
}

impl Default for Ambient {
    fn default() -> Self {
        Self {
            density: 1.213,
            speed_of_sound: 343.0,
            viscosity: 1.839e-5,
            prandtl: 0.710,
            gamma: 1.4,
            pressure: 101_325.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pressurisation {
    /// Pa
    pub delta_p: f64,
    /// m
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElasticMaterial {
    pub id: String,
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub density: f64,
    /// Out-of-plane thickness scaling the plane-stress element, m.
    pub thickness: f64,
    /// Membrane pre-tension `(T_x, T_y)`, Pa·m.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prestress: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pressurisation: Option<Pressurisation>,
}

impl ElasticMaterial {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Validation(format!("material {}: {what}", self.id)));
        if !(self.youngs_modulus > 0.0) {
            return bad("youngs_modulus must be positive");
        }
        if !(self.poisson_ratio >= 0.0 && self.poisson_ratio < 0.5) {
            return bad("poisson_ratio must lie in [0, 0.5)");
        }
        if !(self.density > 0.0) {
            return bad("density must be positive");
        }
        if !(self.thickness > 0.0) {
            return bad("thickness must be positive");
        }
        if self.prestress.is_some() && self.pressurisation.is_some() {
            return bad("give either prestress or pressurisation, not both");
        }
        if let Some(p) = &self.pressurisation {
            if !(p.delta_p >= 0.0) || !(p.radius > 0.0) {
                return bad("pressurisation needs delta_p >= 0 and radius > 0");
            }
        }
        if let Some([tx, ty]) = self.prestress {
            if !tx.is_finite() || !ty.is_finite() {
                return bad("prestress must be finite");
            }
        }
        Ok(())
    }

    /// Membrane tension `(T_x, T_y)` entering the geometric stiffness.
    pub fn tension(&self) -> (f64, f64) {
        match (&self.prestress, &self.pressurisation) {
            (Some([tx, ty]), _) => (*tx, *ty),
            (None, Some(p)) => prestress_from_pressurisation(p.delta_p, p.radius),
            (None, None) => (0.0, 0.0),
        }
    }

    pub fn bending_stiffness(&self, plate_thickness: f64) -> f64 {
        let h = plate_thickness;
        self.youngs_modulus * h * h * h / (12.0 * (1.0 - self.poisson_ratio * self.poisson_ratio))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcousticMaterial {
    pub id: String,
    pub speed_of_sound: f64,
    pub density: f64,
}

impl AcousticMaterial {
    pub fn validate(&self) -> Result<()> {
        if !(self.speed_of_sound > 0.0) || !(self.density > 0.0) {
            return Err(Error::Validation(format!(
                "material {}: speed_of_sound and density must be positive",
                self.id
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JcaMaterial {
    pub id: String,
    pub porosity: f64,
    /// Pa·s/m²
    pub flow_resistivity: f64,
    pub tortuosity: f64,
    /// viscous characteristic length Λ, m
    pub viscous_length: f64,
    /// thermal characteristic length Λ', m
    pub thermal_length: f64,
    /// bulk density of the frame, kg/m³
    pub frame_density: f64,
    #[serde(default)]
    pub ambient: Ambient,
}

impl JcaMaterial {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Validation(format!("material {}: {what}", self.id)));
        if !(self.porosity > 0.0 && self.porosity <= 1.0) {
            return bad("porosity must lie in (0, 1]");
        }
        if !(self.flow_resistivity > 0.0) {
            return bad("flow_resistivity must be positive");
        }
        if !(self.tortuosity >= 1.0) {
            return bad("tortuosity must be at least 1");
        }
        if !(self.viscous_length > 0.0) || !(self.thermal_length > 0.0) {
            return bad("characteristic lengths must be positive");
        }
        if self.viscous_length > self.thermal_length {
            return bad("viscous_length must not exceed thermal_length");
        }
        if !(self.frame_density > 0.0) {
            return bad("frame_density must be positive");
        }
        let a = &self.ambient;
        if [a.density, a.speed_of_sound, a.viscosity, a.prandtl, a.gamma, a.pressure]
            .iter()
            .any(|v| !(*v > 0.0))
        {
            return bad("ambient properties must be positive");
        }
        Ok(())
    }
}

/// Rigid-frame JCA dynamic density and bulk modulus of the fluid in the pores.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JcaRigid {
    pub dynamic_density: C64,
    pub dynamic_bulk: C64,
}

/// Equivalent-fluid properties (per unit bulk volume) with the limp correction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JcaEffective {
    pub density: C64,
    pub bulk: C64,
    pub speed: C64,
}

pub fn jca_rigid(m: &JcaMaterial, f: f64) -> Result<JcaRigid> {
    if !(f > 0.0) {
        return Err(Error::Domain(format!("JCA evaluated at f = {f} Hz")));
    }
    let w = math::angular(f);
    let a = &m.ambient;
    let (phi, sigma, alpha) = (m.porosity, m.flow_resistivity, m.tortuosity);
    let (lv, lt) = (m.viscous_length, m.thermal_length);
    let i = C64::i();

    let visc = (C64::new(sigma * sigma, 0.0)
        + i * (4.0 * alpha * alpha * a.viscosity * a.density * w / (lv * lv * phi * phi)))
        .sqrt();
    let dynamic_density = alpha * a.density + phi * visc / (i * w);

    let inner = (C64::new(1.0, 0.0) + i * (a.density * w * a.prandtl * lt * lt / (16.0 * a.viscosity))).sqrt();
    let g = C64::new(1.0, 0.0) + inner * (8.0 * a.viscosity / (lt * lt * a.prandtl * w * a.density)) / i;
    let dynamic_bulk = a.gamma * a.pressure / (a.gamma - (a.gamma - 1.0) / g);
    Ok(JcaRigid { dynamic_density, dynamic_bulk })
}

/// Equivalent density, bulk modulus and speed of sound of a limp-frame JCA
/// layer at `f` Hz.
pub fn jca_effective(m: &JcaMaterial, f: f64) -> Result<JcaEffective> {
    let r = jca_rigid(m, f)?;
    let phi = m.porosity;
    let rho0 = m.ambient.density;
    let rho_eq = r.dynamic_density / phi;
    let bulk = r.dynamic_bulk / phi;
    let rho_t = m.frame_density + phi * rho0;
    let density = (rho_t * rho_eq - rho0 * rho0) / (rho_t + rho_eq - 2.0 * rho0);
    let speed = (bulk / density).sqrt();
    Ok(JcaEffective { density, bulk, speed })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossFactorTable {
    pub id: String,
    /// ascending `[frequency Hz, η]` pairs
    pub samples: Vec<[f64; 2]>,
}

impl LossFactorTable {
    pub fn constant(id: &str, eta: f64) -> Self {
        Self { id: id.into(), samples: alloc::vec![[1.0, eta]] }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Validation(format!("damping table {}: {what}", self.id)));
        if self.samples.is_empty() {
            return bad("needs at least one sample");
        }
        if self.samples.iter().any(|[f, eta]| !f.is_finite() || !(*eta >= 0.0) || !eta.is_finite()) {
            return bad("loss factors must be finite and non-negative");
        }
        if self.samples.windows(2).any(|w| !(w[0][0] < w[1][0])) {
            return bad("sample frequencies must be strictly ascending");
        }
        Ok(())
    }

    /// Piecewise-linear loss factor, clamped to the end samples.
    pub fn eta(&self, f: f64) -> f64 {
        let s = &self.samples;
        let first = s[0];
        let last = s[s.len() - 1];
        if f <= first[0] {
            return first[1];
        }
        if f >= last[0] {
            return last[1];
        }
        let k = s.partition_point(|p| p[0] <= f);
        let (a, b) = (s[k - 1], s[k]);
        let t = (f - a[0]) / (b[0] - a[0]);
        a[1] + t * (b[1] - a[1])
    }
}

/// `1 + iη(f)`.
pub fn complex_stiffness_scale(table: &LossFactorTable, f: f64) -> C64 {
    C64::new(1.0, table.eta(f))
}

/// Membrane tension of a pressurised closed cylinder: `(Δp R / 2, Δp R)`.
pub fn prestress_from_pressurisation(delta_p: f64, radius: f64) -> (f64, f64) {
    (delta_p * radius / 2.0, delta_p * radius)
}

/// Bending wavelength `2π / k_b` of a plate of thickness `h`,
/// `k_b = (ω² ρ h / D)^{1/4}` with `D = E h³ / (12 (1 − ν²))`.
pub fn bending_wavelength(m: &ElasticMaterial, plate_thickness: f64, f: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::Domain(format!("wavelength at f = {f} Hz")));
    }
    let w = math::angular(f);
    let d = m.bending_stiffness(plate_thickness);
    let k = math::powf(w * w * m.density * plate_thickness / d, 0.25);
    Ok(TAU / k)
}

/// `Re(c) / f`.
pub fn acoustic_wavelength(speed: C64, f: f64) -> Result<f64> {
    if !(f > 0.0) {
        return Err(Error::Domain(format!("wavelength at f = {f} Hz")));
    }
    Ok(speed.re / f)
}
