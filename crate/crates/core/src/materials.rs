//! Physical constants and crystal parameter records.
//!
//! A [`Material`] carries everything downstream modules need: mass density,
//! primitive-cell masses and volume, the lattice parameter, an effective
//! sound velocity for the Debye model and the low-temperature conductivity
//! coefficient k₀ (conductivity k = k₀·T).
//!
//! Two materials are built in. Fields that are estimates rather than
//! measured values are listed in [`Material::estimated_fields`] so reports
//! can echo them.
//!
//! The database file format is TOML, one table per material:
//!
//! ```toml
//! [materials.Cu]
//! density = 8.90e3                        # kg/m³
//! cell_masses_amu = [63.546]              # one entry per atom in the primitive cell
//! lattice_param = 3.61478e-10             # m
//! primitive_cell_volume = 1.1808252e-29   # m³
//! v_eff = 4760.0                          # m/s
//! k0 = 80.0                               # W/(m·K²)
//! estimated = ["v_eff"]                   # optional: fields that are estimates
//! ```
//!
//! Unknown keys are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Error, Result};

/// Fundamental constants (CODATA 2018).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Reference nucleon mass m₀ = 1 amu, kg.
    pub m0: f64,
    /// Boltzmann constant, J/K.
    pub boltzmann: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants { hbar: 1.054_571_817e-34, m0: 1.660_539_066_60e-27, boltzmann: 1.380_649e-23 };

pub const HBAR: f64 = CONSTANTS.hbar;
pub const AMU: f64 = CONSTANTS.m0;

pub const ANGSTROM: f64 = 1e-10;
pub const CENTIMETRE: f64 = 1e-2;
pub const MILLIKELVIN: f64 = 1e-3;

/// Crystal parameters, SI units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Material {
    pub name: String,
    /// Mass density ρ, kg/m³.
    pub density: f64,
    /// Mass of every atom in the primitive cell, kg.
    pub cell_masses: Vec<f64>,
    /// Lattice parameter a, m.
    pub lattice_param: f64,
    /// Effective sound velocity, m/s.
    pub v_eff: f64,
    /// Conductivity coefficient in k = k₀·T, W/(m·K²).
    pub k0: f64,
    /// Primitive-cell volume V₀, m³.
    pub primitive_cell_volume: f64,
    /// Fields populated from defaults or reference tables rather than the
    /// heating calculation's quoted values.
    pub estimated_fields: Vec<String>,
}

impl Material {
    pub fn new(
        name: impl Into<String>,
        density: f64,
        cell_masses: Vec<f64>,
        lattice_param: f64,
        v_eff: f64,
        k0: f64,
        primitive_cell_volume: f64,
    ) -> Result<Self> {
        let mat = Material { name: name.into(), density, cell_masses, lattice_param, v_eff, k0, primitive_cell_volume, estimated_fields: Vec::new() };
        mat.validate()?;
        Ok(mat)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("density", self.density)?;
        require_positive("lattice_param", self.lattice_param)?;
        require_positive("v_eff", self.v_eff)?;
        require_positive("k0", self.k0)?;
        require_positive("primitive_cell_volume", self.primitive_cell_volume)?;
        if self.cell_masses.is_empty() {
            return Err(Error::invalid("cell_masses", "primitive cell has no atoms"));
        }
        for &m in &self.cell_masses {
            require_positive("cell_masses", m)?;
        }
        Ok(())
    }

    pub fn with_estimated(mut self, fields: &[&str]) -> Self {
        for f in fields {
            if !self.estimated_fields.iter().any(|x| x == f) {
                self.estimated_fields.push((*f).to_string());
            }
        }
        self
    }

    /// Σ_ν M_ν, kg.
    pub fn cell_mass(&self) -> f64 {
        self.cell_masses.iter().sum()
    }

    /// ω_D = v_eff·(6π²/V₀)^{1/3}, rad/s.
    pub fn debye_frequency(&self) -> f64 {
        debye_frequency(self.v_eff, self.primitive_cell_volume)
    }

    /// Mass of a body of the given volume, kg.
    pub fn mass_of_volume(&self, volume: f64) -> f64 {
        self.density * volume
    }

    /// Applies CLI/config overrides. A new lattice parameter rescales V₀ by
    /// (a′/a)³ so the cell shape is preserved.
    pub fn with_overrides(&self, o: &MaterialOverrides) -> Result<Material> {
        let mut m = self.clone();
        if let Some(d) = o.density {
            m.density = d;
            m.mark_overridden("density");
        }
        if let Some(v) = o.v_eff {
            m.v_eff = v;
            m.mark_overridden("v_eff");
        }
        if let Some(k) = o.k0 {
            m.k0 = k;
            m.mark_overridden("k0");
        }
        if let Some(a) = o.lattice_param {
            require_positive("lattice_param", a)?;
            m.primitive_cell_volume *= (a / m.lattice_param).powi(3);
            m.lattice_param = a;
            m.mark_overridden("lattice_param");
        }
        m.validate()?;
        Ok(m)
    }

    fn mark_overridden(&mut self, field: &str) {
        // An explicit user value is no longer a default.
        self.estimated_fields.retain(|f| f != field);
    }
}

/// ω_D = v_eff·(6π²/V₀)^{1/3}.
pub fn debye_frequency(v_eff: f64, primitive_cell_volume: f64) -> f64 {
    v_eff * (6.0 * PI * PI / primitive_cell_volume).cbrt()
}

/// Optional replacements for individual material fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialOverrides {
    pub density: Option<f64>,
    pub v_eff: Option<f64>,
    pub k0: Option<f64>,
    pub lattice_param: Option<f64>,
}

impl MaterialOverrides {
    pub fn is_empty(&self) -> bool {
        self.density.is_none() && self.v_eff.is_none() && self.k0.is_none() && self.lattice_param.is_none()
    }
}

/// Default v_eff for Cu; not part of the quoted parameters.
pub const CU_DEFAULT_V_EFF: f64 = 4760.0;
/// Default v_eff for TeO₂; not part of the quoted parameters.
pub const TEO2_DEFAULT_V_EFF: f64 = 3000.0;

/// Copper: fcc, one atom per primitive cell, V₀ = a³/4.
pub fn copper() -> Material {
    let a = 3.614_78 * ANGSTROM;
    Material {
        name: "Cu".into(),
        density: 8.90e3,
        cell_masses: vec![63.546 * AMU],
        lattice_param: a,
        v_eff: CU_DEFAULT_V_EFF,
        // quoted range is 80–170; the lower end is the default
        k0: 80.0,
        primitive_cell_volume: a * a * a / 4.0,
        estimated_fields: Vec::new(),
    }
    .with_estimated(&["v_eff", "cell_masses"])
}

/// Paratellurite TeO₂: 12 atoms (4 Te, 8 O) per tetragonal primitive cell.
/// Density follows from a 750 g crystal filling a 5 cm cube.
pub fn tellurium_dioxide() -> Material {
    let a = 4.8082 * ANGSTROM;
    let c = 7.612 * ANGSTROM;
    let mut masses = vec![127.60 * AMU; 4];
    masses.extend(std::iter::repeat_n(15.999 * AMU, 8));
    Material {
        name: "TeO2".into(),
        density: 0.750 / (5.0 * CENTIMETRE).powi(3),
        cell_masses: masses,
        lattice_param: a,
        v_eff: TEO2_DEFAULT_V_EFF,
        k0: 3.0,
        primitive_cell_volume: a * a * c,
        estimated_fields: Vec::new(),
    }
    .with_estimated(&["v_eff", "cell_masses", "lattice_param", "primitive_cell_volume"])
}

/// Looks up a built-in material by name (`"Cu"` or `"TeO2"`).
pub fn builtin_material(name: &str) -> Result<Material> {
    match name {
        "Cu" => Ok(copper()),
        "TeO2" => Ok(tellurium_dioxide()),
        other => Err(Error::NotFound(other.to_string())),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialRecord {
    density: f64,
    cell_masses_amu: Vec<f64>,
    lattice_param: f64,
    primitive_cell_volume: f64,
    v_eff: f64,
    k0: f64,
    #[serde(default)]
    estimated: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatabaseFile {
    #[serde(default)]
    materials: BTreeMap<String, MaterialRecord>,
}

/// Name → material lookup, seeded with the built-ins.
#[derive(Debug, Clone)]
pub struct MaterialDatabase {
    entries: BTreeMap<String, Material>,
}

impl Default for MaterialDatabase {
    fn default() -> Self {
        Self::builtin()
    }
}

impl MaterialDatabase {
    pub fn builtin() -> Self {
        let mut entries = BTreeMap::new();
        for m in [copper(), tellurium_dioxide()] {
            entries.insert(m.name.clone(), m);
        }
        MaterialDatabase { entries }
    }

    /// Parses a database file. Records replace built-ins with the same name.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: DatabaseFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut db = Self::builtin();
        for (name, r) in file.materials {
            let mut m = Material::new(
                name.clone(),
                r.density,
                r.cell_masses_amu.iter().map(|m| m * AMU).collect(),
                r.lattice_param,
                r.v_eff,
                r.k0,
                r.primitive_cell_volume,
            )?;
            m.estimated_fields = r.estimated;
            db.entries.insert(name, m);
        }
        Ok(db)
    }

    pub fn to_toml_string(&self) -> String {
        let materials = self
            .entries
            .iter()
            .map(|(name, m)| {
                let record = MaterialRecord {
                    density: m.density,
                    cell_masses_amu: m.cell_masses.iter().map(|x| x / AMU).collect(),
                    lattice_param: m.lattice_param,
                    primitive_cell_volume: m.primitive_cell_volume,
                    v_eff: m.v_eff,
                    k0: m.k0,
                    estimated: m.estimated_fields.clone(),
                };
                (name.clone(), record)
            })
            .collect();
        toml::to_string(&DatabaseFile { materials }).expect("material records always serialize")
    }

    pub fn get(&self, name: &str) -> Result<Material> {
        self.entries.get(name).cloned().ok_or_else(|| Error::NotFound(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn builtin_copper() {
        let cu = builtin_material("Cu").unwrap();
        assert_eq!(cu.density, 8.90e3);
        assert_relative_eq!(cu.lattice_param, 3.61478e-10, max_relative = 1e-15);
        // fcc primitive cell is a quarter of the cubic cell
        assert_relative_eq!(cu.primitive_cell_volume, cu.lattice_param.powi(3) / 4.0, max_relative = 1e-15);
        assert!(cu.estimated_fields.iter().any(|f| f == "v_eff"));
    }

    #[test]
    fn builtin_teo2_density_from_crystal_mass() {
        let t = builtin_material("TeO2").unwrap();
        assert_relative_eq!(t.density, 6.0e3, max_relative = 1e-12);
        assert_eq!(t.k0, 3.0);
        assert_eq!(t.cell_masses.len(), 12);
        // the cell parameters are consistent with the measured density to 1%
        let rho_cell = t.cell_mass() / t.primitive_cell_volume;
        assert!((rho_cell / t.density - 1.0).abs() < 0.01, "{rho_cell}");
    }

    #[test]
    fn unknown_material() {
        assert_eq!(builtin_material("Unobtainium"), Err(Error::NotFound("Unobtainium".into())));
    }

    #[test]
    fn debye_frequency_fixture() {
        // direct evaluation of v·(6π²/V₀)^{1/3} for V₀ = a³/4, a = 3.61478 Å
        let v0 = 1.1808252217846839e-29;
        assert_relative_eq!(debye_frequency(5000.0, v0), 85583845386998.14, max_relative = 1e-13);
        assert_relative_eq!(debye_frequency(10000.0, v0), 2.0 * debye_frequency(5000.0, v0), max_relative = 1e-15);
        assert_relative_eq!(debye_frequency(5000.0, 8.0 * v0), 0.5 * debye_frequency(5000.0, v0), max_relative = 1e-15);
    }

    #[test]
    fn rejects_invalid_records() {
        assert!(Material::new("x", -1.0, vec![1e-25], 1e-10, 1e3, 1.0, 1e-30).is_err());
        assert!(Material::new("x", 1.0, vec![], 1e-10, 1e3, 1.0, 1e-30).is_err());
        assert!(Material::new("x", 1.0, vec![0.0], 1e-10, 1e3, 1.0, 1e-30).is_err());
        assert!(Material::new("x", 1.0, vec![1e-25], 1e-10, 0.0, 1.0, 1e-30).is_err());
    }

    #[test]
    fn overrides_clear_default_flags() {
        let cu = copper();
        let o = MaterialOverrides { v_eff: Some(4000.0), lattice_param: Some(2.0 * cu.lattice_param), ..Default::default() };
        let m = cu.with_overrides(&o).unwrap();
        assert_eq!(m.v_eff, 4000.0);
        assert!(!m.estimated_fields.iter().any(|f| f == "v_eff"));
        assert_relative_eq!(m.primitive_cell_volume, 8.0 * cu.primitive_cell_volume, max_relative = 1e-14);
        assert!(cu.with_overrides(&MaterialOverrides { k0: Some(-1.0), ..Default::default() }).is_err());
    }

    #[test]
    fn database_round_trip_and_strict_keys() {
        let db = MaterialDatabase::builtin();
        let text = db.to_toml_string();
        let back = MaterialDatabase::from_toml_str(&text).unwrap();
        let (a, b) = (db.get("TeO2").unwrap(), back.get("TeO2").unwrap());
        assert_relative_eq!(a.cell_mass(), b.cell_mass(), max_relative = 1e-14);
        assert_eq!(a.estimated_fields, b.estimated_fields);

        let bad = "[materials.X]\ndensity = 1.0\ncell_masses_amu = [1.0]\nlattice_param = 1e-10\n\
                   primitive_cell_volume = 1e-30\nv_eff = 1.0\nk0 = 1.0\ndensty = 2.0\n";
        assert!(matches!(MaterialDatabase::from_toml_str(bad), Err(Error::Parse(_))));
    }

    #[test]
    fn database_adds_custom_material() {
        let text = "[materials.Ge]\ndensity = 5.323e3\ncell_masses_amu = [72.63, 72.63]\n\
                    lattice_param = 5.658e-10\nprimitive_cell_volume = 4.528e-29\nv_eff = 3500.0\nk0 = 0.5\n";
        let db = MaterialDatabase::from_toml_str(text).unwrap();
        let ge = db.get("Ge").unwrap();
        assert_eq!(ge.cell_masses.len(), 2);
        assert!(db.names().any(|n| n == "Cu"));
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn debye_frequency_is_homogeneous(v in 100.0f64..1e4, v0 in 1e-30f64..1e-27, s in 0.1f64..10.0) {
            let w = debye_frequency(v, v0);
            prop_assert!(w > 0.0);
            prop_assert!((debye_frequency(s * v, v0) / (s * w) - 1.0).abs() < 1e-13);
            prop_assert!((debye_frequency(v, s * v0) / (w * s.powf(-1.0 / 3.0)) - 1.0).abs() < 1e-13);
        }
    }
}
