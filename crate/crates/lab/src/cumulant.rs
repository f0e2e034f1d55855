//! Second-order time-ordered-cumulant master equation for a small system
//! driven by a classical Gaussian field.
//!
//! The perturbation is V(t) = −ħ ξ(t) L with real, zero-mean ξ and
//! E ξ(t)ξ(s) = f(t − s). Truncated at the second cumulant, the averaged
//! state obeys
//!
//! ```text
//! dρ/dt = −(i/ħ)[H₀, ρ] − ½([L†, [K(t), ρ]] + h.c.)
//! K(t)  = ∫₀^{min(t, 8τ_c)} f(τ) L̃(−τ) dτ,   L̃(−τ) = e^{−iH₀τ/ħ} L e^{iH₀τ/ħ}
//! ```
//!
//! For Hermitian L the "+ h.c." half is redundant. White noise,
//! f = γδ, gives K = (γ/2)L and the double-commutator generator
//! −(γ/2)[L, [L, ρ]]. The exponential kernel is normalised so that its
//! zero-frequency strength stays γ as τ_c → 0:
//! f(τ) = γ/(2τ_c) e^{−|τ|/τ_c}.
//!
//! K is evaluated by trapezoid quadrature over L̃(−τ) stored on a uniform
//! history grid; ρ is advanced with classical RK4.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use csl_heat::materials::HBAR;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const MAX_DIM: usize = 16;
/// Memory window in units of τ_c.
pub const MEMORY_WINDOW: f64 = 8.0;
/// History grid points per τ_c.
pub const HISTORY_RESOLUTION: f64 = 128.0;
const HERMITIAN_TOL: f64 = 1e-12;
const STATE_TOL: f64 = 1e-10;
const TRACE_DRIFT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum NoiseModel {
    /// E ξ(t)ξ(s) = γ δ(t − s); γ in 1/s.
    White { gamma: f64 },
    /// E ξ(t)ξ(s) = γ/(2τ_c) e^{−|t−s|/τ_c}.
    Exponential { gamma: f64, tau_c: f64 },
}

impl NoiseModel {
    pub fn gamma(&self) -> f64 {
        match *self {
            NoiseModel::White { gamma } | NoiseModel::Exponential { gamma, .. } => gamma,
        }
    }

    /// Correlation f(τ) for τ ≥ 0; not defined for white noise.
    pub fn kernel(&self, tau: f64) -> f64 {
        match *self {
            NoiseModel::White { .. } => f64::NAN,
            NoiseModel::Exponential { gamma, tau_c } => gamma / (2.0 * tau_c) * (-tau.abs() / tau_c).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallSystem {
    /// J
    pub h0: CMatrix,
    pub l_op: CMatrix,
    pub noise: NoiseModel,
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

impl SmallSystem {
    pub fn new(h0: CMatrix, l_op: CMatrix, noise: NoiseModel) -> Result<Self> {
        let s = SmallSystem { h0, l_op, noise };
        s.validate()?;
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.h0.nrows()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.h0.nrows();
        if !(2..=MAX_DIM).contains(&d) || !self.h0.is_square() {
            return Err(Error::input(format!("H0 must be square with dimension in 2..={MAX_DIM}")));
        }
        if self.l_op.shape() != (d, d) {
            return Err(Error::input(format!("L has shape {:?}, expected ({d}, {d})", self.l_op.shape())));
        }
        let scale = max_abs(&self.h0).max(f64::MIN_POSITIVE);
        if hermitian_defect(&self.h0) > HERMITIAN_TOL * scale {
            return Err(Error::input("H0 is not Hermitian"));
        }
        match self.noise {
            NoiseModel::White { gamma } if gamma.is_finite() && gamma >= 0.0 => Ok(()),
            NoiseModel::Exponential { gamma, tau_c } if gamma.is_finite() && gamma >= 0.0 && tau_c.is_finite() && tau_c > 0.0 => Ok(()),
            n => Err(Error::input(format!("invalid noise parameters {n:?}"))),
        }
    }

    pub fn l_is_hermitian(&self) -> bool {
        hermitian_defect(&self.l_op) <= HERMITIAN_TOL * max_abs(&self.l_op).max(f64::MIN_POSITIVE)
    }
}

fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// White-noise generator −(i/ħ)[H₀, ρ] − (γ/2)·½([L†, [L, ρ]] + h.c.).
pub fn white_generator(sys: &SmallSystem, rho: &CMatrix) -> CMatrix {
    let k = &sys.l_op * Complex64::new(0.5 * sys.noise.gamma(), 0.0);
    generator(sys, &k, rho)
}

fn generator(sys: &SmallSystem, k: &CMatrix, rho: &CMatrix) -> CMatrix {
    let unitary = commutator(&sys.h0, rho) * Complex64::new(0.0, -1.0 / HBAR);
    let d = commutator(&sys.l_op.adjoint(), &commutator(k, rho));
    unitary - (&d + d.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Checks that `rho` is a density matrix: Hermitian, unit trace, PSD.
pub fn validate_density(rho: &CMatrix) -> Result<()> {
    if !rho.is_square() {
        return Err(Error::input("density matrix must be square"));
    }
    if hermitian_defect(rho) > STATE_TOL {
        return Err(Error::input("density matrix is not Hermitian"));
    }
    if (rho.trace() - Complex64::new(1.0, 0.0)).norm() > STATE_TOL {
        return Err(Error::input(format!("density matrix trace {} ≠ 1", rho.trace())));
    }
    let eig = rho.clone().symmetric_eigenvalues();
    if eig.iter().any(|&e| e < -STATE_TOL) {
        return Err(Error::input("density matrix is not positive semi-definite"));
    }
    Ok(())
}

/// Stored memory history: prefix sums of f(τ_m) L̃(−τ_m) on τ_m = mδ.
struct History {
    delta: f64,
    window: usize,
    fl: Vec<CMatrix>,
    prefix: Vec<CMatrix>,
}

impl History {
    fn new(sys: &SmallSystem, tau_c: f64, delta: f64, n_max: usize) -> Self {
        let window = ((MEMORY_WINDOW * tau_c / delta).round() as usize).max(1);
        let len = window.min(n_max) + 1;
        let eig = sys.h0.clone().symmetric_eigen();
        let v = eig.eigenvectors.clone();
        let v_adj = v.adjoint();
        let l_eig = &v_adj * &sys.l_op * &v;
        let e = &eig.eigenvalues;
        let d = sys.dim();
        let mut fl = Vec::with_capacity(len);
        let mut prefix: Vec<CMatrix> = Vec::with_capacity(len);
        for m in 0..len {
            let tau = m as f64 * delta;
            let f = sys.noise.kernel(tau);
            // e^{−iH₀τ/ħ} L e^{iH₀τ/ħ} in the eigenbasis
            let rotated = CMatrix::from_fn(d, d, |a, b| l_eig[(a, b)] * Complex64::from_polar(1.0, -(e[a] - e[b]) * tau / HBAR));
            let term = &v * rotated * &v_adj * Complex64::new(f, 0.0);
            let next = match prefix.last() {
                Some(p) => p + &term,
                None => term.clone(),
            };
            fl.push(term);
            prefix.push(next);
        }
        History { delta, window, fl, prefix }
    }

    /// Trapezoid rule over τ ∈ [0, min(nδ, window·δ)].
    fn kernel_integral(&self, n: usize) -> CMatrix {
        let top = n.min(self.window);
        if top == 0 {
            return CMatrix::zeros(self.fl[0].nrows(), self.fl[0].ncols());
        }
        (&self.prefix[top] - (&self.fl[0] + &self.fl[top]) * Complex64::new(0.5, 0.0)) * Complex64::new(self.delta, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterSolution {
    pub times: Vec<f64>,
    pub states: Vec<CMatrix>,
}

fn step_count(t: f64, dt: f64) -> Result<usize> {
    if !(t.is_finite() && t >= 0.0 && dt.is_finite() && dt > 0.0) {
        return Err(Error::input(format!("need t ≥ 0 and dt > 0, got t = {t}, dt = {dt}")));
    }
    Ok((t / dt).round().max(if t > 0.0 { 1.0 } else { 0.0 }) as usize)
}

/// Integrates to time `t` with step ≈ `dt` (rounded so that an integer
/// number of steps lands on `t`), recording every step.
pub fn master_equation_series(sys: &SmallSystem, rho0: &CMatrix, t: f64, dt: f64) -> Result<MasterSolution> {
    sys.validate()?;
    validate_density(rho0)?;
    if rho0.nrows() != sys.dim() {
        return Err(Error::input("ρ₀ dimension does not match the system"));
    }
    let steps = step_count(t, dt)?;
    let h = if steps > 0 { t / steps as f64 } else { 0.0 };

    // history grid δ divides h/2 so that RK4 stages fall on grid points
    let (history, sub) = match sys.noise {
        NoiseModel::White { .. } => (None, 0),
        NoiseModel::Exponential { tau_c, .. } => {
            let sub = ((0.5 * h) / (tau_c / HISTORY_RESOLUTION)).ceil().max(1.0) as usize;
            let delta = 0.5 * h / sub as f64;
            (Some(History::new(sys, tau_c, delta, 2 * sub * steps)), sub)
        }
    };
    let k_at = |half_steps: usize| -> CMatrix {
        match &history {
            None => &sys.l_op * Complex64::new(0.5 * sys.noise.gamma(), 0.0),
            Some(hist) => hist.kernel_integral(half_steps * sub),
        }
    };

    let mut rho = rho0.clone();
    let mut times = vec![0.0];
    let mut states = vec![rho.clone()];
    let hc = Complex64::new(h, 0.0);
    let half = Complex64::new(0.5, 0.0);
    for n in 0..steps {
        let (k0, k1, k2) = (k_at(2 * n), k_at(2 * n + 1), k_at(2 * n + 2));
        let s1 = generator(sys, &k0, &rho);
        let s2 = generator(sys, &k1, &(&rho + &s1 * hc * half));
        let s3 = generator(sys, &k1, &(&rho + &s2 * hc * half));
        let s4 = generator(sys, &k2, &(&rho + &s3 * hc));
        rho += (s1 + (s2 + s3) * Complex64::new(2.0, 0.0) + s4) * (hc / 6.0);
        rho = (&rho + rho.adjoint()) * half;
        let drift = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
        if drift > TRACE_DRIFT_TOL {
            return Err(Error::Integrator(format!("trace drift {drift:e} at step {}", n + 1)));
        }
        times.push((n + 1) as f64 * h);
        states.push(rho.clone());
    }
    Ok(MasterSolution { times, states })
}

/// ρ(t) under the second-cumulant master equation.
pub fn evolve_master_second_cumulant(sys: &SmallSystem, rho0: &CMatrix, t: f64, dt: f64) -> Result<CMatrix> {
    let mut sol = master_equation_series(sys, rho0, t, dt)?;
    Ok(sol.states.pop().expect("initial state is always recorded"))
}

/// ½ Σ|eig(ρ − σ)| for Hermitian ρ, σ.
pub fn trace_distance(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    let d = rho - sigma;
    let d = (&d + d.adjoint()) * Complex64::new(0.5, 0.0);
    0.5 * d.symmetric_eigenvalues().iter().map(|e| e.abs()).sum::<f64>()
}

pub mod ops {
    //! Pauli matrices and pure-state helpers.

    use super::CMatrix;
    use nalgebra::DVector;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn sigma_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
    }

    pub fn sigma_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
    }

    /// (|0⟩ + |1⟩)/√2
    pub fn plus_state() -> DVector<Complex64> {
        DVector::from_element(2, c(std::f64::consts::FRAC_1_SQRT_2, 0.0))
    }

    pub fn projector(psi: &DVector<Complex64>) -> CMatrix {
        psi * psi.adjoint()
    }
}
