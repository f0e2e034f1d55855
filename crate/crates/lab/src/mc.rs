//! Monte-Carlo check of white-noise heating on a finite phonon lattice.
//!
//! To linear order in the noise each mode amplitude evolves as
//!
//! ```text
//! a_ks(t) = e^{−iωt} [ a_ks(0) + i Σ_k̃ ∫₀ᵗ e^{iωt'} g_ks(k̃) dW(t', k̃) ]
//! ```
//!
//! so starting from the vacuum the normal-ordered energy is
//! ΔE = Σ_ks |B_ks(t)|² with
//!
//! ```text
//! B_ks(t_n) = Σ_{j<n} e^{iωt_j} Σ_k̃ C_ks(k̃) ΔW_j(k̃)
//! C_ks(k̃)   = w e^{−r_c²k̃²/2} (M/m₀) Σ_i e^{−ik̃·R_i} √(ħω) η_{i,ks}(k̃)
//! ```
//!
//! on a probe grid with cell weight w. With E|ΔW|² = γΔt/w the expected
//! energy grows at exactly Σ_ks Σ_k̃ |C|² γ/w (the discrete oracle), which
//! tends to 3ħ²λ𝓜/(4m₀²r_c²) as the probe grid resolves the Gaussian.
//!
//! The ω = 0 translation modes enter through √(ħω)η, which stays finite;
//! without them Σ_k e^{ik·(R_i−R_j)} = Nδ_ij fails and a crystal smaller
//! than r_c barely heats. They can be switched off for comparison.

use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use csl_heat::heating::energy_growth_white;
use csl_heat::lattice::{build_grid, ModeGrid};
use csl_heat::materials::{Material, AMU};
use csl_heat::noise::{CslParams, ProbeGrid, WhiteNoiseSampler};

use crate::error::{Error, Result};
use crate::stats::{chi_square_line, mean_and_stderr, quadratic_through_origin, slope_through_origin, ChiSquareLine};

/// Largest allowed dt·max(ω).
pub const RESOLUTION_GUARD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeSpec {
    /// Half-width of the cube in units of 1/r_c.
    pub extent: f64,
    pub per_axis: usize,
}

impl ProbeSpec {
    pub fn build(&self, r_c: f64) -> Result<ProbeGrid> {
        Ok(ProbeGrid::cubic(self.extent, self.per_axis, r_c)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McConfig {
    pub cells_per_edge: usize,
    pub probe: ProbeSpec,
    /// s
    pub dt: f64,
    pub steps: usize,
    pub trajectories: usize,
    pub seed: u64,
    /// Energy is recorded every `record_every` steps.
    pub record_every: usize,
    pub include_translation_modes: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            cells_per_edge: 4,
            probe: ProbeSpec { extent: 4.0, per_axis: 7 },
            dt: 5e-16,
            steps: 40,
            trajectories: 1000,
            seed: 1,
            record_every: 5,
            include_translation_modes: true,
        }
    }
}

impl McConfig {
    pub fn validate(&self, grid: &ModeGrid) -> Result<()> {
        if self.trajectories < 2 {
            return Err(Error::input(format!("need ≥ 2 trajectories, got {}", self.trajectories)));
        }
        if self.steps == 0 || self.record_every == 0 {
            return Err(Error::input("steps and record_every must be ≥ 1"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::input(format!("dt must be > 0, got {}", self.dt)));
        }
        let guard = self.dt * grid.max_omega();
        if guard >= RESOLUTION_GUARD {
            return Err(Error::input(format!("dt·max(ω) = {guard:.3} ≥ {RESOLUTION_GUARD}; reduce dt below {:.3e} s", RESOLUTION_GUARD / grid.max_omega())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McResult {
    /// Ensemble slope of ⟨ΔE⟩(t), W.
    pub slope: f64,
    pub stderr: f64,
    pub discrete_oracle: f64,
    /// 3ħ²λ𝓜/(4m₀²r_c²) for the simulated crystal, W.
    pub continuum_slope: f64,
    pub times: Vec<f64>,
    pub mean_energy: Vec<f64>,
    pub energy_stderr: Vec<f64>,
    /// Ensemble t² coefficient of a quadratic fit and its standard error.
    pub quadratic: (f64, f64),
    pub chi_square: Option<ChiSquareLine>,
    pub warning: Option<String>,
    pub modes: usize,
    pub probe_points: usize,
}

/// Coupling matrix C[mode][probe].
pub struct Couplings {
    pub grid: ModeGrid,
    pub probe: ProbeGrid,
    pub omega: Vec<f64>,
    pub c: Vec<Vec<Complex64>>,
}

impl Couplings {
    pub fn new(grid: ModeGrid, probe: ProbeGrid, r_c: f64, include_translation_modes: bool) -> Result<Self> {
        let w = probe.cell_weight();
        let mass_ratio = grid.site_mass() / AMU;
        let mut omega = Vec::new();
        let mut c = Vec::new();
        let sums: Vec<Vec<Complex64>> =
            probe.points().iter().map(|kt| grid.modes().iter().step_by(3).map(|m| grid.lattice_sum(&(kt + m.k))).collect()).collect();
        for (mi, mode) in grid.modes().iter().enumerate() {
            if mode.is_translation() && !include_translation_modes {
                continue;
            }
            // √(ħω)η_i = η₀ e^{−ik·R_i}; Σ_i e^{−ik̃·R_i} of it gives S(k̃+k)
            let row = probe
                .points()
                .iter()
                .enumerate()
                .map(|(pi, kt)| {
                    let eta0 = grid.energy_scaled_eta(mi, 0, kt)?;
                    let env = w * (-0.5 * r_c * r_c * kt.norm_squared()).exp() * mass_ratio;
                    Ok(env * eta0 * sums[pi][mi / 3])
                })
                .collect::<Result<Vec<_>>>()?;
            omega.push(mode.omega);
            c.push(row);
        }
        Ok(Couplings { grid, probe, omega, c })
    }

    /// Σ_ks Σ_k̃ |C|² γ/w, W.
    pub fn discrete_oracle(&self, params: &CslParams) -> f64 {
        let scale = params.gamma() / self.probe.cell_weight();
        self.c.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * scale
    }
}

/// Discrete oracle from the Parseval form γħ²N M/(2m₀²) Σ_k̃ w k̃² e^{−r_c²k̃²},
/// valid when all modes, translations included, are kept.
pub fn parseval_oracle(grid: &ModeGrid, probe: &ProbeGrid, params: &CslParams) -> f64 {
    let hbar = csl_heat::materials::HBAR;
    let w = probe.cell_weight();
    let r2 = params.r_c * params.r_c;
    let sum: f64 = probe.points().iter().map(|k| w * k.norm_squared() * (-r2 * k.norm_squared()).exp()).sum();
    params.gamma() * hbar * hbar * grid.total_mass() * grid.site_mass() / (2.0 * AMU * AMU) * sum
}

/// Discrete oracle for an L-cell crystal of `mat` on the given probe grid.
pub fn discrete_oracle(cells_per_edge: usize, probe: &ProbeSpec, params: &CslParams, mat: &Material, include_translation_modes: bool) -> Result<f64> {
    let grid = build_grid(cells_per_edge, mat)?;
    let probe = probe.build(params.r_c)?;
    Ok(Couplings::new(grid, probe, params.r_c, include_translation_modes)?.discrete_oracle(params))
}

fn run_trajectory(cp: &Couplings, params: &CslParams, cfg: &McConfig, traj: usize) -> Result<Vec<f64>> {
    let mut sampler = WhiteNoiseSampler::new(params, &cp.probe, cfg.dt, cfg.seed, traj as u64)?;
    let mut dw = vec![Complex64::new(0.0, 0.0); cp.probe.len()];
    let mut b = vec![Complex64::new(0.0, 0.0); cp.c.len()];
    let mut energies = Vec::with_capacity(cfg.steps / cfg.record_every);
    for j in 0..cfg.steps {
        sampler.fill(&mut dw);
        let t = j as f64 * cfg.dt;
        for ((bm, row), &om) in b.iter_mut().zip(&cp.c).zip(&cp.omega) {
            let x: Complex64 = row.iter().zip(&dw).map(|(c, w)| c * w).sum();
            *bm += Complex64::from_polar(1.0, om * t) * x;
        }
        if (j + 1) % cfg.record_every == 0 {
            energies.push(b.iter().map(|z| z.norm_sqr()).sum());
        }
    }
    Ok(energies)
}

/// Runs the ensemble and fits ⟨ΔE⟩(t).
///
/// Trajectory n draws its noise from stream n of `cfg.seed`, so results are
/// reproducible and independent of the thread count.
pub fn mc_energy_growth(cfg: &McConfig, params: &CslParams, mat: &Material) -> Result<McResult> {
    let grid = build_grid(cfg.cells_per_edge, mat)?;
    cfg.validate(&grid)?;
    let total_mass = grid.total_mass();
    let probe = cfg.probe.build(params.r_c)?;
    let cp = Couplings::new(grid, probe, params.r_c, cfg.include_translation_modes)?;
    let discrete_oracle = cp.discrete_oracle(params);
    let continuum_slope = energy_growth_white(params, total_mass, 1.0)?;

    let series: Vec<Vec<f64>> = (0..cfg.trajectories).into_par_iter().map(|n| run_trajectory(&cp, params, cfg, n)).collect::<Result<_>>()?;
    let times: Vec<f64> = (1..=cfg.steps / cfg.record_every).map(|k| (k * cfg.record_every) as f64 * cfg.dt).collect();
    if times.is_empty() {
        return Err(Error::input("record_every exceeds steps; nothing recorded"));
    }

    let slopes: Vec<f64> = series.iter().map(|e| slope_through_origin(&times, e)).collect();
    let (slope, stderr) = mean_and_stderr(&slopes);
    let (mean_energy, energy_stderr): (Vec<f64>, Vec<f64>) =
        (0..times.len()).map(|k| mean_and_stderr(&series.iter().map(|e| e[k]).collect::<Vec<_>>())).unzip();

    let quad: Vec<f64> = series.iter().map(|e| quadratic_through_origin(&times, e).1).collect();
    let quadratic = if times.len() >= 2 { mean_and_stderr(&quad) } else { (0.0, 0.0) };
    let warning = (quadratic.1 > 0.0 && quadratic.0.abs() > 3.0 * quadratic.1)
        .then(|| format!("model violation: t² term {:.3e} ± {:.3e} W/s differs from zero by more than 3σ", quadratic.0, quadratic.1));
    let chi_square = chi_square_line(&times, &series);

    Ok(McResult {
        slope,
        stderr,
        discrete_oracle,
        continuum_slope,
        times,
        mean_energy,
        energy_stderr,
        quadratic,
        chi_square,
        warning,
        modes: cp.c.len(),
        probe_points: cp.probe.len(),
    })
}

/// |S(k̃)|² contribution of the three translation modes to the oracle:
/// γ (M/m₀)² ħ²/(2NM) Σ_k̃ w e^{−r_c²k̃²} k̃² |S(k̃)|².
pub fn translation_mode_share(grid: &ModeGrid, probe: &ProbeGrid, params: &CslParams) -> f64 {
    let hbar = csl_heat::materials::HBAR;
    let w = probe.cell_weight();
    let m = grid.site_mass();
    let pref = params.gamma() * (m / AMU).powi(2) * hbar * hbar / (2.0 * grid.cells() as f64 * m);
    let r2 = params.r_c * params.r_c;
    probe.points().iter().map(|k: &Vector3<f64>| w * (-r2 * k.norm_squared()).exp() * k.norm_squared() * grid.lattice_sum(k).norm_sqr()).sum::<f64>() * pref
}
