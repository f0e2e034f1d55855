//! Unitary noise trajectories for a small system.
//!
//! Each step applies U = exp(−iH₀Δt/ħ + i L ΔΦ) with ΔΦ = ∫ξ dt over the
//! step, which is the Stratonovich-consistent splitting and keeps every
//! trajectory normalised. White noise draws ΔΦ ~ N(0, γΔt); exponential
//! noise propagates ξ as a stationary Ornstein–Uhlenbeck process and
//! integrates it with the trapezoid rule.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use csl_heat::materials::HBAR;
use csl_heat::rng::stream_rng;

use crate::cumulant::{trace_distance, CMatrix, NoiseModel, SmallSystem};
use crate::error::{Error, Result};
use crate::stats::bootstrap_stderr;

pub type CVector = DVector<Complex64>;

const NORM_DRIFT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    /// Ensemble-averaged |ψ⟩⟨ψ| at the final time.
    pub mean: CMatrix,
    /// Final state of each trajectory, in seed-stream order.
    pub states: Vec<CVector>,
    pub steps: usize,
}

impl TrajectoryEnsemble {
    /// Average of |ψ⟩⟨ψ| over the given trajectory indices.
    pub fn mean_of(&self, indices: &[usize]) -> CMatrix {
        let d = self.mean.nrows();
        let mut acc = CMatrix::zeros(d, d);
        for &i in indices {
            let psi = &self.states[i];
            acc += psi * psi.adjoint();
        }
        acc / Complex64::new(indices.len() as f64, 0.0)
    }

    /// Trace distance to `reference` and its bootstrap standard error.
    pub fn compare(&self, reference: &CMatrix, resamples: usize, seed: u64) -> (f64, f64) {
        let td = trace_distance(&self.mean, reference);
        let se = bootstrap_stderr(self.states.len(), resamples, seed, |idx| trace_distance(&self.mean_of(idx), reference));
        (td, se)
    }
}

/// exp(iA) for Hermitian A.
fn unitary_exp(a: &CMatrix) -> CMatrix {
    let eig = a.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::from_polar(1.0, l)));
    v * phases * v.adjoint()
}

fn run_one(sys: &SmallSystem, psi0: &CVector, steps: usize, h: f64, seed: u64, stream: u64) -> Result<CVector> {
    let mut rng = stream_rng(seed, stream);
    let mut psi = psi0.clone();
    let drift = sys.h0.map(|z| z * (-h / HBAR));
    let gamma = sys.noise.gamma();
    let mut xi = match sys.noise {
        NoiseModel::White { .. } => 0.0,
        NoiseModel::Exponential { tau_c, .. } => (gamma / (2.0 * tau_c)).sqrt() * rng.sample::<f64, _>(StandardNormal),
    };
    for n in 0..steps {
        let phase = match sys.noise {
            NoiseModel::White { .. } => (gamma * h).sqrt() * rng.sample::<f64, _>(StandardNormal),
            NoiseModel::Exponential { tau_c, .. } => {
                let decay = (-h / tau_c).exp();
                let sd = (gamma / (2.0 * tau_c) * (1.0 - decay * decay)).sqrt();
                let next = decay * xi + sd * rng.sample::<f64, _>(StandardNormal);
                let p = 0.5 * h * (xi + next);
                xi = next;
                p
            }
        };
        let a = &drift + sys.l_op.map(|z| z * phase);
        psi = unitary_exp(&a) * psi;
        let drift_norm = (psi.norm() - 1.0).abs();
        if drift_norm > NORM_DRIFT_TOL {
            return Err(Error::Integrator(format!("norm drift {drift_norm:e} at step {}", n + 1)));
        }
    }
    Ok(psi)
}

/// Evolves `n_traj` trajectories from |ψ₀⟩ to time `t` (step rounded so
/// that an integer number of steps lands on `t`). Trajectory n uses noise
/// stream n of `seed`.
pub fn evolve_trajectories(sys: &SmallSystem, psi0: &CVector, t: f64, dt: f64, n_traj: usize, seed: u64) -> Result<TrajectoryEnsemble> {
    sys.validate()?;
    if !sys.l_is_hermitian() {
        return Err(Error::input("unitary trajectories need a Hermitian coupling operator"));
    }
    if psi0.len() != sys.dim() || (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::input("ψ₀ must be normalised and match the system dimension"));
    }
    if n_traj == 0 {
        return Err(Error::input("need at least one trajectory"));
    }
    if !(t.is_finite() && t >= 0.0 && dt.is_finite() && dt > 0.0) {
        return Err(Error::input(format!("need t ≥ 0 and dt > 0, got t = {t}, dt = {dt}")));
    }
    let steps = if t > 0.0 { (t / dt).round().max(1.0) as usize } else { 0 };
    let h = if steps > 0 { t / steps as f64 } else { 0.0 };
    let states: Vec<CVector> = (0..n_traj).into_par_iter().map(|n| run_one(sys, psi0, steps, h, seed, n as u64)).collect::<Result<_>>()?;
    let d = sys.dim();
    let mut mean = CMatrix::zeros(d, d);
    for psi in &states {
        mean += psi * psi.adjoint();
    }
    mean /= Complex64::new(n_traj as f64, 0.0);
    Ok(TrajectoryEnsemble { mean, states, steps })
}
