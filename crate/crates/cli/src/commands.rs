//! Command-line definitions and dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;

use csl_heat::diffusion::{profile, Geometry, LengthScaling, ThermalLoad};
use csl_heat::heating::rate_nonwhite_debye_check;
use csl_heat::materials::{MaterialDatabase, MaterialOverrides, HBAR};
use csl_heat::noise::CslParams;
use csl_lab::cumulant::{master_equation_series, CMatrix, NoiseModel, SmallSystem};
use csl_lab::mc::{mc_energy_growth, McConfig, ProbeSpec};
use csl_lab::sde::{ito_to_strat, strat_to_ito, LinearSde};
use csl_lab::trajectory::evolve_trajectories;

use crate::error::{CliError, Result};
use crate::scenario::{
    builtin_scenario, heating_rate, profile_table, run_scenario, sweep, sweep_table, ConfigFile, Scenario, SpectrumSpec, SweepParam, DEFAULT_SAMPLES,
    DEFAULT_TOL,
};
use crate::table::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "cslheat", version, about = "Collapse-noise heating rates, temperature profiles and stochastic checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// TOML config with `[scenario]` and `[materials.NAME]` tables.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write result files into this directory instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long, default_value = "Cu")]
    pub material: String,
    /// Collapse rate λ, 1/s.
    #[arg(long, default_value_t = 1e-8)]
    pub lambda: f64,
    /// Correlation length r_c, m.
    #[arg(long, default_value_t = 1e-7)]
    pub rc: f64,
    /// flat | step:OMEGA | step-ratio:X | file:PATH
    #[arg(long, default_value = "flat")]
    pub spectrum: String,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub v_eff: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Volumetric heating rate: q_dot, method, error_estimate.
    Rate {
        #[command(flatten)]
        rate: RateArgs,
        /// Also integrate only up to the Debye frequency and report the difference.
        #[arg(long)]
        debye_check: bool,
    },
    /// Steady-state temperature profile: r, T_exact, T_linearized.
    Profile {
        /// sphere:R | cylinder:R | slab:HALF_WIDTH (m)
        #[arg(long)]
        geometry: String,
        /// Surface temperature, K.
        #[arg(long)]
        ts: f64,
        /// Conductivity coefficient, W/(m·K²); defaults to the material's.
        #[arg(long)]
        k0: Option<f64>,
        /// Heating rate, W/m³.
        #[arg(long, conflicts_with = "from_rate")]
        qdot: Option<f64>,
        /// Compute q_dot from the rate options.
        #[arg(long)]
        from_rate: bool,
        #[command(flatten)]
        rate: RateArgs,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// reference | physical
        #[arg(long, default_value = "reference")]
        length_scaling: String,
    },
    /// Run a built-in scenario, or the `[scenario]` of --config.
    Scenario { name: Option<String> },
    /// Re-run a scenario over a list of parameter values.
    Sweep {
        name: Option<String>,
        /// lambda | rc | cutoff (Ω r_c/v_eff)
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
    },
    /// Monte-Carlo energy growth on a phonon lattice: t, mean_energy, stderr.
    Mc {
        #[arg(long, default_value = "Cu")]
        material: String,
        #[arg(long, default_value_t = 1e-8)]
        lambda: f64,
        #[arg(long, default_value_t = 1e-7)]
        rc: f64,
        #[arg(long, default_value_t = 4)]
        cells: usize,
        #[arg(long, default_value_t = 7)]
        probe_points: usize,
        /// Probe-grid half-width in units of 1/r_c.
        #[arg(long, default_value_t = 4.0)]
        probe_extent: f64,
        #[arg(long, default_value_t = 5e-16)]
        dt: f64,
        #[arg(long, default_value_t = 40)]
        steps: usize,
        #[arg(long, default_value_t = 1000)]
        trajectories: usize,
        #[arg(long, default_value_t = 5)]
        record_every: usize,
        #[arg(long)]
        no_translation_modes: bool,
    },
    /// Master equation vs trajectory ensemble: t, trace_distance, bootstrap_se.
    Cumulant {
        /// TOML system file.
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long, default_value_t = 2000)]
        trajectories: usize,
        /// Number of output times.
        #[arg(long, default_value_t = 10)]
        points: usize,
    },
    /// Convert a linear SDE between Stratonovich and Itô form.
    ConvertSde {
        #[arg(long)]
        input: PathBuf,
    },
}

/// A named result: written to `<output>/<stem>.<ext>` or printed.
pub enum Artifact {
    Table(&'static str, Table),
    Json(&'static str, Value),
    Text(&'static str, &'static str, String),
}

fn load_config(g: &GlobalOpts) -> Result<ConfigFile> {
    match &g.config {
        Some(p) => ConfigFile::load(p),
        None => Ok(ConfigFile::default()),
    }
}

fn resolve_material(db: &MaterialDatabase, rate: &RateArgs) -> Result<csl_heat::materials::Material> {
    let o = MaterialOverrides { density: rate.density, v_eff: rate.v_eff, ..Default::default() };
    Ok(db.get(&rate.material)?.with_overrides(&o)?)
}

fn scenario_from(g: &GlobalOpts, cfg: &ConfigFile, name: Option<&str>) -> Result<Scenario> {
    match (name, &cfg.scenario) {
        (Some(n), _) => builtin_scenario(n, g.seed),
        (None, Some(s)) => s.resolve(&cfg.database()?, g.seed),
        (None, None) => Err(CliError::Usage("give a scenario name or a --config with a [scenario] table".into())),
    }
}

/// Runs one command and returns its artifacts.
pub fn execute(cli: &Cli) -> Result<Vec<Artifact>> {
    let g = &cli.global;
    let cfg = load_config(g)?;
    match &cli.command {
        Command::Rate { rate, debye_check } => {
            let db = cfg.database()?;
            let mat = resolve_material(&db, rate)?;
            let params = CslParams::new(rate.lambda, rate.rc)?;
            let spec = SpectrumSpec::parse(&rate.spectrum)?;
            let q = heating_rate(&spec, params, &mat, rate.tol)?;
            let mut t = if *debye_check {
                Table::new(&["q_dot", "method", "error_estimate", "q_dot_debye", "debye_relative_difference"])
            } else {
                Table::new(&["q_dot", "method", "error_estimate"])
            };
            let mut row = vec![Cell::Num(q.q_dot), q.method.as_str().into(), Cell::Num(q.error_estimate)];
            if *debye_check {
                let d = rate_nonwhite_debye_check(&spec.build(params, &mat)?, &mat, rate.tol)?;
                row.push(Cell::Num(d.to_debye.q_dot));
                row.push(Cell::Num(d.relative_difference));
            }
            t.push(row);
            Ok(vec![Artifact::Table("rate", t)])
        }
        Command::Profile { geometry, ts, k0, qdot, from_rate, rate, samples, length_scaling } => {
            let db = cfg.database()?;
            let mat = resolve_material(&db, rate)?;
            let q = match (qdot, from_rate) {
                (Some(q), false) => *q,
                (None, true) => heating_rate(&SpectrumSpec::parse(&rate.spectrum)?, CslParams::new(rate.lambda, rate.rc)?, &mat, rate.tol)?.q_dot,
                _ => return Err(CliError::Usage("give exactly one of --qdot or --from-rate".into())),
            };
            let load = ThermalLoad::new(*ts, q, k0.unwrap_or(mat.k0))?;
            let p = profile(&load, &Geometry::parse(geometry)?, LengthScaling::parse(length_scaling)?, *samples)?;
            Ok(vec![Artifact::Table("profile", profile_table(&p))])
        }
        Command::Scenario { name } => {
            let s = scenario_from(g, &cfg, name.as_deref())?;
            let mut report = run_scenario(&s)?;
            let mut out = Vec::new();
            if let Some(dir) = &g.output {
                let ext = match g.format {
                    Format::Csv => "csv",
                    Format::Json => "json",
                };
                report.profile_path = Some(dir.join(format!("profile.{ext}")).display().to_string());
                out.push(Artifact::Table("profile", profile_table(&report.profile)));
            }
            match g.format {
                Format::Json => out.push(Artifact::Json("report", serde_json::to_value(&report).map_err(|e| CliError::Io(e.to_string()))?)),
                Format::Csv => out.push(Artifact::Table("report", report.summary_table())),
            }
            Ok(out)
        }
        Command::Sweep { name, param, values } => {
            let s = scenario_from(g, &cfg, name.as_deref())?;
            let p = SweepParam::parse(param)?;
            let rows = sweep(&s, p, values)?;
            Ok(vec![Artifact::Table("sweep", sweep_table(p, &rows))])
        }
        Command::Mc { material, lambda, rc, cells, probe_points, probe_extent, dt, steps, trajectories, record_every, no_translation_modes } => {
            let mat = cfg.database()?.get(material)?;
            let params = CslParams::new(*lambda, *rc)?;
            let mc = McConfig {
                cells_per_edge: *cells,
                probe: ProbeSpec { extent: *probe_extent, per_axis: *probe_points },
                dt: *dt,
                steps: *steps,
                trajectories: *trajectories,
                seed: g.seed,
                record_every: *record_every,
                include_translation_modes: !no_translation_modes,
            };
            let r = mc_energy_growth(&mc, &params, &mat)?;
            let mut series = Table::new(&["t", "mean_energy", "stderr"]);
            for ((t, e), s) in r.times.iter().zip(&r.mean_energy).zip(&r.energy_stderr) {
                series.push(vec![Cell::Num(*t), Cell::Num(*e), Cell::Num(*s)]);
            }
            let mut summary = Table::new(&["slope", "stderr", "discrete_oracle", "continuum_slope", "chi2_p_value", "warning"]);
            summary.push(vec![
                r.slope.into(),
                r.stderr.into(),
                r.discrete_oracle.into(),
                r.continuum_slope.into(),
                r.chi_square.map_or(f64::NAN, |c| c.p_value).into(),
                r.warning.clone().unwrap_or_default().into(),
            ]);
            Ok(vec![Artifact::Table("mc", series), Artifact::Table("mc_summary", summary)])
        }
        Command::Cumulant { system, t, dt, trajectories, points } => {
            let spec = SystemFile::load(system)?;
            let (sys, psi0) = spec.build()?;
            if *points == 0 {
                return Err(CliError::Usage("--points must be ≥ 1".into()));
            }
            let rho0 = &psi0 * psi0.adjoint();
            let me = master_equation_series(&sys, &rho0, *t, *dt)?;
            let steps = me.times.len() - 1;
            let mut table = Table::new(&["t", "trace_distance", "bootstrap_se"]);
            for k in 1..=*points {
                let n = (k * steps) / points;
                let tk = me.times[n];
                let ens = evolve_trajectories(&sys, &psi0, tk, *dt, *trajectories, g.seed)?;
                let (td, se) = ens.compare(&me.states[n], 500, g.seed);
                table.push(vec![Cell::Num(tk), Cell::Num(td), Cell::Num(se)]);
            }
            Ok(vec![Artifact::Table("cumulant", table)])
        }
        Command::ConvertSde { input } => {
            let text = std::fs::read_to_string(input).map_err(|e| CliError::Usage(format!("`{}`: {e}", input.display())))?;
            let file = SdeFile::parse(&text)?;
            let converted = file.convert()?;
            Ok(vec![Artifact::Text("sde", "toml", converted)])
        }
    }
}

/// Writes artifacts to `--output` or `out`.
pub fn emit(g: &GlobalOpts, artifacts: &[Artifact], out: &mut dyn Write) -> Result<()> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    let render = |a: &Artifact| -> Result<(&'static str, &'static str, String)> {
        Ok(match (a, g.format) {
            (Artifact::Table(stem, t), Format::Csv) => (stem, "csv", t.to_csv()?),
            (Artifact::Table(stem, t), Format::Json) => (stem, "json", json_string(&t.to_json())?),
            (Artifact::Json(stem, v), _) => (stem, "json", json_string(v)?),
            (Artifact::Text(stem, ext, s), _) => (stem, ext, s.clone()),
        })
    };
    match &g.output {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(io)?;
            for a in artifacts {
                let (stem, ext, body) = render(a)?;
                let path = dir.join(format!("{stem}.{ext}"));
                std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                writeln!(out, "{}", path.display()).map_err(io)?;
            }
        }
        None => {
            for a in artifacts {
                let (_, _, body) = render(a)?;
                out.write_all(body.as_bytes()).map_err(io)?;
                if !body.ends_with('\n') {
                    writeln!(out).map_err(io)?;
                }
            }
        }
    }
    Ok(())
}

fn json_string(v: &Value) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))
}

/// Small-system description for `cumulant`. Matrices are row lists; `h0`
/// is H₀/ħ in rad/s; `*_im` parts are optional.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub h0: Vec<Vec<f64>>,
    pub h0_im: Option<Vec<Vec<f64>>>,
    pub l: Vec<Vec<f64>>,
    pub l_im: Option<Vec<Vec<f64>>>,
    pub psi0: Vec<f64>,
    pub psi0_im: Option<Vec<f64>>,
    pub noise: NoiseFile,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
pub enum NoiseFile {
    White { gamma: f64 },
    Exponential { gamma: f64, tau_c: f64 },
}

fn complex_matrix(re: &[Vec<f64>], im: Option<&Vec<Vec<f64>>>, what: &str) -> Result<CMatrix> {
    let n = re.len();
    let bad = || CliError::Usage(format!("`{what}` must be a square matrix matching its imaginary part"));
    if n == 0 || re.iter().any(|r| r.len() != n) {
        return Err(bad());
    }
    if let Some(im) = im {
        if im.len() != n || im.iter().any(|r| r.len() != n) {
            return Err(bad());
        }
    }
    Ok(CMatrix::from_fn(n, n, |i, j| Complex64::new(re[i][j], im.map_or(0.0, |m| m[i][j]))))
}

impl SystemFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("system `{}`: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("system `{}`: {}", path.display(), e.message())))
    }

    pub fn build(&self) -> Result<(SmallSystem, DVector<Complex64>)> {
        let h0 = complex_matrix(&self.h0, self.h0_im.as_ref(), "h0")? * Complex64::new(HBAR, 0.0);
        let l = complex_matrix(&self.l, self.l_im.as_ref(), "l")?;
        let noise = match self.noise {
            NoiseFile::White { gamma } => NoiseModel::White { gamma },
            NoiseFile::Exponential { gamma, tau_c } => NoiseModel::Exponential { gamma, tau_c },
        };
        let sys = SmallSystem::new(h0, l, noise)?;
        let im = self.psi0_im.clone().unwrap_or_else(|| vec![0.0; self.psi0.len()]);
        if im.len() != self.psi0.len() {
            return Err(CliError::Usage("psi0 and psi0_im lengths differ".into()));
        }
        let psi = DVector::from_iterator(self.psi0.len(), self.psi0.iter().zip(&im).map(|(&r, &i)| Complex64::new(r, i)));
        Ok((sys, psi))
    }
}

/// Linear SDE file for `convert-sde`.
#[derive(Debug, Clone, PartialEq, Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct SdeFile {
    /// `stratonovich` or `ito`
    pub convention: String,
    #[serde(rename = "A")]
    pub a_mat: Vec<Vec<f64>>,
    pub a: Vec<f64>,
    #[serde(rename = "B", default)]
    pub b_mats: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub b: Vec<Vec<f64>>,
}

fn real_matrix(rows: &[Vec<f64>], d: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(CliError::Usage(format!("`{what}` must be {d}×{d}")));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl SdeFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("sde file: {}", e.message())))
    }

    pub fn to_sde(&self) -> Result<LinearSde> {
        let d = self.a.len();
        let a_mat = real_matrix(&self.a_mat, d, "A")?;
        let b_mats = self.b_mats.iter().enumerate().map(|(j, m)| real_matrix(m, d, &format!("B[{j}]"))).collect::<Result<Vec<_>>>()?;
        let b_vecs = self.b.iter().map(|v| DVector::from_column_slice(v)).collect();
        Ok(LinearSde::new(a_mat, DVector::from_column_slice(&self.a), b_mats, b_vecs)?)
    }

    pub fn from_sde(sde: &LinearSde, convention: &str) -> Self {
        SdeFile {
            convention: convention.to_string(),
            a_mat: rows_of(&sde.a_mat),
            a: sde.a_vec.iter().copied().collect(),
            b_mats: sde.b_mats.iter().map(rows_of).collect(),
            b: sde.b_vecs.iter().map(|v| v.iter().copied().collect()).collect(),
        }
    }

    /// Converts to the other convention and serialises as TOML.
    pub fn convert(&self) -> Result<String> {
        let sde = self.to_sde()?;
        let out = match self.convention.as_str() {
            "stratonovich" => SdeFile::from_sde(&strat_to_ito(&sde), "ito"),
            "ito" => SdeFile::from_sde(&ito_to_strat(&sde), "stratonovich"),
            other => return Err(CliError::Usage(format!("unknown convention `{other}` (stratonovich|ito)"))),
        };
        toml::to_string(&out).map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Parses `args`, runs, and writes to `out`; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return e.exit_code();
        }
    };
    match execute(&cli).and_then(|a| emit(&cli.global, &a, out)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
