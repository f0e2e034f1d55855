//! Phonon modes of a mono-atomic simple-cubic crystal in the Debye model.
//!
//! The crystal has N = L³ sites R_i = a·(n_x, n_y, n_z), n ∈ {0..L−1}, with
//! periodic boundary conditions, so wave-vectors lie on the grid
//! k = 2π m/(L a) with m in the first Brillouin zone. Every k carries three
//! acoustic branches (one longitudinal, two transverse) with dispersion
//! ω = v_eff |k|, giving 3N modes. The three k = 0 modes are rigid
//! translations with ω = 0.
//!
//! Polarisations are real, so ε(−k) = ε*(k) = ε(k) requires the same vector
//! for k and −k: the longitudinal vector is ±k̂ with the sign fixed so its
//! first non-zero component is positive. The first transverse vector is the
//! reference axis ẑ projected perpendicular to k̂ (x̂ when k̂ is within
//! ~25° of ẑ), the second is k̂ × TA1.
//!
//! For a polyatomic material the whole primitive cell is lumped into one
//! site of mass Σ_ν M_ν with spacing V₀^{1/3}; the long-wave heating only
//! depends on the total mass.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{require_positive, Error, Result};
use crate::materials::{Material, HBAR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    LA,
    TA1,
    TA2,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::LA, Branch::TA1, Branch::TA2];
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    /// Integer Brillouin-zone coordinates m, k = 2π m/(L a).
    pub index: [i64; 3],
    pub k: Vector3<f64>,
    pub branch: Branch,
    pub polarization: Vector3<f64>,
    /// rad/s
    pub omega: f64,
}

impl Mode {
    pub fn is_translation(&self) -> bool {
        self.index == [0, 0, 0]
    }
}

#[derive(Debug, Clone)]
pub struct ModeGrid {
    cells_per_edge: usize,
    spacing: f64,
    site_mass: f64,
    v_eff: f64,
    modes: Vec<Mode>,
}

const REFERENCE_AXIS: Vector3<f64> = Vector3::new(0.0, 0.0, 1.0);
const FALLBACK_AXIS: Vector3<f64> = Vector3::new(1.0, 0.0, 0.0);

/// Brillouin-zone integer range for L cells: (−L/2, L/2] for even L,
/// [−(L−1)/2, (L−1)/2] for odd L.
fn zone_indices(l: usize) -> impl Iterator<Item = i64> {
    let l = l as i64;
    let lo = -(l - 1) / 2;
    lo..lo + l
}

fn wrap_index(m: i64, l: usize) -> i64 {
    let l = l as i64;
    let lo = -(l - 1) / 2;
    (m - lo).rem_euclid(l) + lo
}

fn canonical_sign(v: Vector3<f64>) -> Vector3<f64> {
    for c in v.iter() {
        if *c != 0.0 {
            return if *c > 0.0 { v } else { -v };
        }
    }
    v
}

fn polarizations(k: &Vector3<f64>) -> [Vector3<f64>; 3] {
    let norm = k.norm();
    if norm == 0.0 {
        return [Vector3::x(), Vector3::y(), Vector3::z()];
    }
    let khat = canonical_sign(k / norm);
    let reference = if khat.dot(&REFERENCE_AXIS).abs() > 0.9 { FALLBACK_AXIS } else { REFERENCE_AXIS };
    let t1 = (reference - khat * khat.dot(&reference)).normalize();
    let t2 = khat.cross(&t1);
    [khat, t1, t2]
}

/// Builds the 3L³ acoustic modes for `mat`.
pub fn build_grid(cells_per_edge: usize, mat: &Material) -> Result<ModeGrid> {
    if cells_per_edge < 2 {
        return Err(Error::InvalidSize(format!("need at least 2 cells per edge, got {cells_per_edge}")));
    }
    mat.validate()?;
    let spacing = mat.primitive_cell_volume.cbrt();
    ModeGrid::simple_cubic(cells_per_edge, spacing, mat.cell_mass(), mat.v_eff)
}

impl ModeGrid {
    pub fn simple_cubic(cells_per_edge: usize, spacing: f64, site_mass: f64, v_eff: f64) -> Result<Self> {
        if cells_per_edge < 2 {
            return Err(Error::InvalidSize(format!("need at least 2 cells per edge, got {cells_per_edge}")));
        }
        require_positive("spacing", spacing)?;
        require_positive("site_mass", site_mass)?;
        require_positive("v_eff", v_eff)?;
        let l = cells_per_edge;
        let dk = 2.0 * PI / (l as f64 * spacing);
        let mut modes = Vec::with_capacity(3 * l * l * l);
        for mx in zone_indices(l) {
            for my in zone_indices(l) {
                for mz in zone_indices(l) {
                    let k = Vector3::new(mx as f64, my as f64, mz as f64) * dk;
                    let omega = v_eff * k.norm();
                    for (branch, polarization) in Branch::ALL.into_iter().zip(polarizations(&k)) {
                        modes.push(Mode { index: [mx, my, mz], k, branch, polarization, omega });
                    }
                }
            }
        }
        Ok(ModeGrid { cells_per_edge: l, spacing, site_mass, v_eff, modes })
    }

    pub fn cells_per_edge(&self) -> usize {
        self.cells_per_edge
    }

    /// N = L³
    pub fn cells(&self) -> usize {
        self.cells_per_edge.pow(3)
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn site_mass(&self) -> f64 {
        self.site_mass
    }

    /// N·M, kg.
    pub fn total_mass(&self) -> f64 {
        self.cells() as f64 * self.site_mass
    }

    pub fn v_eff(&self) -> f64 {
        self.v_eff
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Modes with ω > 0.
    pub fn dynamical_modes(&self) -> impl Iterator<Item = &Mode> {
        self.modes.iter().filter(|m| !m.is_translation())
    }

    pub fn max_omega(&self) -> f64 {
        self.modes.iter().map(|m| m.omega).fold(0.0, f64::max)
    }

    /// Index of the mode at −k on the same branch.
    pub fn mirror_mode(&self, mode: usize) -> usize {
        let m = &self.modes[mode];
        let l = self.cells_per_edge;
        let neg = m.index.map(|c| wrap_index(-c, l));
        let pos = |c: i64| (c - zone_indices(l).next().unwrap()) as usize;
        let cell = (pos(neg[0]) * l + pos(neg[1])) * l + pos(neg[2]);
        3 * cell + Branch::ALL.iter().position(|b| *b == m.branch).unwrap()
    }

    /// Site position R_i, i = (n_x·L + n_y)·L + n_z.
    pub fn site(&self, i: usize) -> Vector3<f64> {
        let l = self.cells_per_edge;
        let (nx, rem) = (i / (l * l), i % (l * l));
        let (ny, nz) = (rem / l, rem % l);
        Vector3::new(nx as f64, ny as f64, nz as f64) * self.spacing
    }

    /// S(q) = Σ_i e^{−i q·R_i}, evaluated as a product of three geometric
    /// series.
    pub fn lattice_sum(&self, q: &Vector3<f64>) -> Complex64 {
        let l = self.cells_per_edge;
        let mut total = Complex64::new(1.0, 0.0);
        for c in q.iter() {
            let phase = Complex64::from_polar(1.0, -c * self.spacing);
            let mut s = Complex64::new(0.0, 0.0);
            let mut z = Complex64::new(1.0, 0.0);
            for _ in 0..l {
                s += z;
                z *= phase;
            }
            total *= s;
        }
        total
    }

    /// η_{i,ks}(k̃) = −i (ħ/2NMω)^{1/2} (k̃·ε*) e^{−ik·R_i}.
    ///
    /// Undefined for the ω = 0 translation modes; use
    /// [`ModeGrid::energy_scaled_eta`] there.
    pub fn eta(&self, mode: usize, site: usize, probe: &Vector3<f64>) -> Result<Complex64> {
        let m = self.mode(mode)?;
        if m.is_translation() {
            return Err(Error::Domain("η diverges for the ω = 0 translation modes".into()));
        }
        let scaled = self.energy_scaled_eta(mode, site, probe)?;
        Ok(scaled / (HBAR * m.omega).sqrt())
    }

    /// √(ħω)·η, which stays finite as ω → 0:
    /// −i (ħ²/2NM)^{1/2} (k̃·ε) e^{−ik·R_i}.
    pub fn energy_scaled_eta(&self, mode: usize, site: usize, probe: &Vector3<f64>) -> Result<Complex64> {
        let m = self.mode(mode)?;
        if site >= self.cells() {
            return Err(Error::InvalidSize(format!("site {site} out of range for {} cells", self.cells())));
        }
        let amp = HBAR / (2.0 * self.cells() as f64 * self.site_mass).sqrt();
        let proj = probe.dot(&m.polarization);
        let phase = Complex64::from_polar(1.0, -m.k.dot(&self.site(site)));
        Ok(Complex64::new(0.0, -amp * proj) * phase)
    }

    fn mode(&self, mode: usize) -> Result<&Mode> {
        self.modes.get(mode).ok_or_else(|| Error::InvalidSize(format!("mode {mode} out of range for {} modes", self.modes.len())))
    }
}
