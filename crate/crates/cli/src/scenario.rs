//! Scenario runner: material → noise → heating rate → temperature profile.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use csl_heat::diffusion::{core_temperature, profile, Geometry, LengthScaling, TemperatureProfile, ThermalLoad};
use csl_heat::heating::{rate_nonwhite, rate_white, HeatingRate};
use csl_heat::materials::{Material, MaterialDatabase, MaterialOverrides};
use csl_heat::noise::{CslParams, NoiseSpectrum, TabulatedSpectrum};

use crate::error::{CliError, Result};
use crate::table::{Cell, Table};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SAMPLES: usize = 101;

/// Noise spectrum as given on the command line or in a config file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SpectrumSpec {
    Flat,
    /// Cutoff Ω in rad/s.
    Step(f64),
    /// Cutoff as the dimensionless Ω r_c/v_eff.
    StepRatio(f64),
    /// Two-column table (ω in rad/s, γ in m³).
    File(String),
}

impl SpectrumSpec {
    /// `flat`, `step:OMEGA`, `step-ratio:X` or `file:PATH`.
    pub fn parse(s: &str) -> Result<Self> {
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("spectrum `{s}`: {e}")));
        match s.split_once(':') {
            None if s == "flat" => Ok(SpectrumSpec::Flat),
            Some(("step", v)) => Ok(SpectrumSpec::Step(num(v)?)),
            Some(("step-ratio", v)) => Ok(SpectrumSpec::StepRatio(num(v)?)),
            Some(("file", p)) => Ok(SpectrumSpec::File(p.to_string())),
            _ => Err(CliError::Usage(format!("unknown spectrum `{s}` (flat|step:OMEGA|step-ratio:X|file:PATH)"))),
        }
    }

    pub fn build(&self, params: CslParams, mat: &Material) -> Result<NoiseSpectrum> {
        Ok(match self {
            SpectrumSpec::Flat => NoiseSpectrum::flat(params),
            SpectrumSpec::Step(omega) => NoiseSpectrum::step_cutoff(params, *omega)?,
            SpectrumSpec::StepRatio(x) => NoiseSpectrum::step_cutoff(params, x * mat.v_eff / params.r_c)?,
            SpectrumSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("spectrum file `{path}`: {e}")))?;
                NoiseSpectrum::tabulated(params, TabulatedSpectrum::parse(&text)?)
            }
        })
    }
}

impl fmt::Display for SpectrumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumSpec::Flat => write!(f, "flat"),
            SpectrumSpec::Step(w) => write!(f, "step:{w:e}"),
            SpectrumSpec::StepRatio(x) => write!(f, "step-ratio:{x:e}"),
            SpectrumSpec::File(p) => write!(f, "file:{p}"),
        }
    }
}

/// q̇ for the given spectrum: closed form for flat noise, quadrature otherwise.
pub fn heating_rate(spec: &SpectrumSpec, params: CslParams, mat: &Material, tol: f64) -> Result<HeatingRate> {
    match spec {
        SpectrumSpec::Flat => Ok(rate_white(&params, mat)),
        other => Ok(rate_nonwhite(&other.build(params, mat)?, mat, tol)?),
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub material: Material,
    pub params: CslParams,
    pub spectrum: SpectrumSpec,
    pub geometry: Geometry,
    pub length_scaling: LengthScaling,
    /// K
    pub t_s: f64,
    /// Quadrature tolerance for non-flat spectra.
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    /// Every value that was filled in rather than given.
    pub applied_defaults: Vec<String>,
}

/// Config-file form of a scenario (`[scenario]` table).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: Option<String>,
    pub material: String,
    pub lambda: f64,
    pub rc: f64,
    pub spectrum: Option<String>,
    pub geometry: String,
    pub length_scaling: Option<String>,
    pub t_s: f64,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    #[serde(default)]
    pub overrides: MaterialOverrides,
}

/// Top-level config file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<ScenarioConfig>,
    pub materials: Option<toml::Table>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("config `{}`: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| e.context(path.display()))
    }

    /// Built-in materials plus any `[materials.NAME]` tables.
    pub fn database(&self) -> Result<MaterialDatabase> {
        match &self.materials {
            None => Ok(MaterialDatabase::builtin()),
            Some(t) => {
                let mut doc = toml::Table::new();
                doc.insert("materials".into(), toml::Value::Table(t.clone()));
                let text = toml::to_string(&doc).map_err(|e| CliError::Usage(e.to_string()))?;
                Ok(MaterialDatabase::from_toml_str(&text)?)
            }
        }
    }
}

fn note_material_defaults(mat: &Material, out: &mut Vec<String>) {
    for f in &mat.estimated_fields {
        let value = match f.as_str() {
            "v_eff" => format!("{} m/s", mat.v_eff),
            "k0" => format!("{} W/(m·K²)", mat.k0),
            "lattice_param" => format!("{:e} m", mat.lattice_param),
            "primitive_cell_volume" => format!("{:e} m³", mat.primitive_cell_volume),
            "cell_masses" => format!("{:e} kg per cell", mat.cell_mass()),
            _ => String::from("default"),
        };
        out.push(format!("{}.{f} = {value} (estimated default)", mat.name));
    }
}

impl ScenarioConfig {
    pub fn resolve(&self, db: &MaterialDatabase, seed: u64) -> Result<Scenario> {
        let mut applied = Vec::new();
        let base = db.get(&self.material)?;
        let material = base.with_overrides(&self.overrides)?;
        note_material_defaults(&material, &mut applied);
        let spectrum = match &self.spectrum {
            Some(s) => SpectrumSpec::parse(s)?,
            None => {
                applied.push("spectrum = flat (default)".into());
                SpectrumSpec::Flat
            }
        };
        let length_scaling = match &self.length_scaling {
            Some(s) => LengthScaling::parse(s)?,
            None => {
                applied.push("length_scaling = reference (default)".into());
                LengthScaling::Reference
            }
        };
        let tol = self.tol.unwrap_or_else(|| {
            if spectrum != SpectrumSpec::Flat {
                applied.push(format!("tol = {DEFAULT_TOL:e} (default)"));
            }
            DEFAULT_TOL
        });
        let samples = self.samples.unwrap_or_else(|| {
            applied.push(format!("samples = {DEFAULT_SAMPLES} (default)"));
            DEFAULT_SAMPLES
        });
        Ok(Scenario {
            name: self.name.clone().unwrap_or_else(|| "custom".into()),
            params: CslParams::new(self.lambda, self.rc)?,
            material,
            spectrum,
            geometry: Geometry::parse(&self.geometry)?,
            length_scaling,
            t_s: self.t_s,
            tol,
            samples,
            seed,
            applied_defaults: applied,
        })
    }
}

pub const BUILTIN_SCENARIOS: [&str; 3] = ["cu-cuore", "cu-cuore-k170", "teo2-cuore"];

/// Built-in scenario configs.
pub fn builtin_scenario_config(name: &str) -> Result<ScenarioConfig> {
    let cu = |k0: f64| ScenarioConfig {
        name: Some(name.to_string()),
        material: "Cu".into(),
        lambda: 1e-8,
        rc: 1e-7,
        spectrum: Some("flat".into()),
        // no body size is attached to the copper estimate; the reference
        // core rise does not depend on it
        geometry: "sphere:0.1".into(),
        length_scaling: Some("reference".into()),
        t_s: 0.03,
        tol: None,
        samples: None,
        overrides: MaterialOverrides { k0: Some(k0), ..Default::default() },
    };
    match name {
        "cu-cuore" => Ok(cu(80.0)),
        "cu-cuore-k170" => Ok(cu(170.0)),
        "teo2-cuore" => Ok(ScenarioConfig {
            name: Some(name.to_string()),
            material: "TeO2".into(),
            lambda: 1e-8,
            rc: 1e-7,
            spectrum: Some("flat".into()),
            geometry: "sphere:0.031".into(),
            length_scaling: Some("reference".into()),
            t_s: 0.01,
            tol: None,
            samples: None,
            overrides: MaterialOverrides { k0: Some(3.0), ..Default::default() },
        }),
        other => Err(CliError::Usage(format!("unknown scenario `{other}` (built-ins: {})", BUILTIN_SCENARIOS.join(", ")))),
    }
}

pub fn builtin_scenario(name: &str, seed: u64) -> Result<Scenario> {
    let mut s = builtin_scenario_config(name)?.resolve(&MaterialDatabase::builtin(), seed)?;
    if name.starts_with("cu-") {
        s.applied_defaults.push("geometry = sphere:0.1 (assumed default; reference core rise is size independent)".into());
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub version: String,
    pub q_dot: f64,
    pub power_per_mass: f64,
    pub rate_method: String,
    pub rate_error_estimate: f64,
    pub core_temperature_exact: f64,
    pub core_temperature_linearized: f64,
    pub core_delta_exact: f64,
    pub core_delta_linearized: f64,
    /// Linearised core rise per unit λ, K·s; absent when λ = 0.
    pub core_delta_per_lambda: Option<f64>,
    pub profile_path: Option<String>,
    #[serde(skip)]
    pub profile: TemperatureProfile,
}

impl RunReport {
    pub fn summary_table(&self) -> Table {
        let mut t = Table::new(&[
            "scenario",
            "material",
            "lambda",
            "rc",
            "spectrum",
            "geometry",
            "length_scaling",
            "t_s",
            "k0",
            "q_dot",
            "method",
            "error_estimate",
            "core_delta_exact",
            "core_delta_linearized",
            "core_delta_per_lambda",
        ]);
        let s = &self.scenario;
        t.push(vec![
            s.name.as_str().into(),
            s.material.name.as_str().into(),
            s.params.lambda.into(),
            s.params.r_c.into(),
            s.spectrum.to_string().into(),
            format!("{}:{}", s.geometry.name(), s.geometry.characteristic_length()).into(),
            s.length_scaling.as_str().into(),
            s.t_s.into(),
            s.material.k0.into(),
            self.q_dot.into(),
            self.rate_method.as_str().into(),
            self.rate_error_estimate.into(),
            self.core_delta_exact.into(),
            self.core_delta_linearized.into(),
            self.core_delta_per_lambda.map_or(Cell::Text(String::new()), Cell::Num),
        ]);
        t
    }
}

pub fn profile_table(p: &TemperatureProfile) -> Table {
    let mut t = Table::new(&["r", "T_exact", "T_linearized"]);
    for s in &p.samples {
        t.push(vec![Cell::Num(s.r), Cell::Num(s.t_exact), Cell::Num(s.t_linearized)]);
    }
    t
}

/// Deterministic rate → profile chain.
pub fn run_scenario(s: &Scenario) -> Result<RunReport> {
    let rate = heating_rate(&s.spectrum, s.params, &s.material, s.tol).map_err(|e| e.context("heating rate"))?;
    let load = ThermalLoad::new(s.t_s, rate.q_dot, s.material.k0)?;
    let core = core_temperature(&load, &s.geometry, s.length_scaling)?;
    let prof = profile(&load, &s.geometry, s.length_scaling, s.samples)?;
    Ok(RunReport {
        scenario: s.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        q_dot: rate.q_dot,
        power_per_mass: rate.power_per_mass,
        rate_method: rate.method.as_str().to_string(),
        rate_error_estimate: rate.error_estimate,
        core_temperature_exact: core.exact,
        core_temperature_linearized: core.linearized,
        core_delta_exact: core.delta_exact,
        core_delta_linearized: core.delta_linearized,
        core_delta_per_lambda: (s.params.lambda > 0.0).then(|| core.delta_linearized / s.params.lambda),
        profile_path: None,
        profile: prof,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepParam {
    Lambda,
    Rc,
    /// Step cutoff as Ω r_c/v_eff.
    Cutoff,
}

impl SweepParam {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(SweepParam::Lambda),
            "rc" => Ok(SweepParam::Rc),
            "cutoff" => Ok(SweepParam::Cutoff),
            other => Err(CliError::Usage(format!("unknown sweep parameter `{other}` (lambda|rc|cutoff)"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::Rc => "rc",
            SweepParam::Cutoff => "cutoff",
        }
    }

    fn apply(&self, base: &Scenario, value: f64) -> Result<Scenario> {
        let mut s = base.clone();
        match self {
            SweepParam::Lambda => s.params = CslParams::new(value, s.params.r_c)?,
            SweepParam::Rc => s.params = CslParams::new(s.params.lambda, value)?,
            SweepParam::Cutoff => s.spectrum = SpectrumSpec::StepRatio(value),
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub report: RunReport,
    /// Linearised core rise relative to white noise at the same λ, r_c.
    pub ratio_to_white: f64,
}

/// One run per value, evaluated in parallel, returned in input order.
pub fn sweep(base: &Scenario, param: SweepParam, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(CliError::Usage("sweep needs at least one value".into()));
    }
    values
        .par_iter()
        .enumerate()
        .map(|(i, &v)| {
            let row = || -> Result<SweepRow> {
                let s = param.apply(base, v)?;
                let report = run_scenario(&s)?;
                let white = rate_white(&s.params, &s.material).q_dot;
                let ratio_to_white = if white > 0.0 { report.q_dot / white } else { 0.0 };
                Ok(SweepRow { value: v, report, ratio_to_white })
            };
            row().map_err(|e| e.context(format!("sweep row {i} ({} = {v:e})", param.as_str())))
        })
        .collect()
}

pub fn sweep_table(param: SweepParam, rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&[param.as_str(), "q_dot", "method", "error_estimate", "core_delta_exact", "core_delta_linearized", "ratio_to_white"]);
    for r in rows {
        t.push(vec![
            r.value.into(),
            r.report.q_dot.into(),
            r.report.rate_method.as_str().into(),
            r.report.rate_error_estimate.into(),
            r.report.core_delta_exact.into(),
            r.report.core_delta_linearized.into(),
            r.ratio_to_white.into(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_parsing() {
        assert_eq!(SpectrumSpec::parse("flat").unwrap(), SpectrumSpec::Flat);
        assert_eq!(SpectrumSpec::parse("step:1e13").unwrap(), SpectrumSpec::Step(1e13));
        assert_eq!(SpectrumSpec::parse("step-ratio:0.5").unwrap(), SpectrumSpec::StepRatio(0.5));
        assert!(SpectrumSpec::parse("pink").is_err());
        assert!(SpectrumSpec::parse("step:x").is_err());
    }

    #[test]
    fn unknown_config_key_names_the_key() {
        let text = "[scenario]\nmaterial = \"Cu\"\nlamda = 1e-8\nrc = 1e-7\ngeometry = \"sphere:0.1\"\nt_s = 0.03\n";
        let err = ConfigFile::parse(text).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("lamda"), "{err}");
    }

    #[test]
    fn defaults_are_echoed() {
        let s = builtin_scenario("cu-cuore", 1).unwrap();
        assert!(s.applied_defaults.iter().any(|d| d.contains("v_eff")));
        assert!(s.applied_defaults.iter().any(|d| d.contains("geometry")));
        assert!(s.applied_defaults.iter().any(|d| d.contains("samples")));
    }

    #[test]
    fn custom_material_from_config() {
        let text = r#"
[scenario]
material = "Al"
lambda = 1e-8
rc = 1e-7
geometry = "slab:0.01"
t_s = 0.02

[materials.Al]
density = 2.7e3
cell_masses_amu = [26.98]
lattice_param = 4.05e-10
primitive_cell_volume = 1.66e-29
v_eff = 5100.0
k0 = 10.0
estimated = ["v_eff"]
"#;
        let cfg = ConfigFile::parse(text).unwrap();
        let s = cfg.scenario.as_ref().unwrap().resolve(&cfg.database().unwrap(), 0).unwrap();
        assert_eq!(s.material.density, 2.7e3);
        let r = run_scenario(&s).unwrap();
        assert!(r.core_delta_linearized > 0.0);
    }
}
