//! Collapse-noise statistics.
//!
//! The noise field ξ(t, k̃) is a complex Gaussian field with
//! ξ*(t, k̃) = ξ(t, −k̃) and
//!
//! ```text
//! E[ξ(t,k̃) ξ(t',k̃')] = (2π)³ δ(k̃+k̃') f(t−t'),   f(t) = (1/2π) ∫ γ(ω) e^{−iωt} dω
//! ```
//!
//! with γ(ω) = γ = 8π^{3/2} λ r_c³ for white noise.
//!
//! Units: ξ carries m³/s so that the stochastic potential
//! V(t) = −ħ ∫ d³k̃/(2π)³ e^{−r_c²k̃²/2} ξ(t,k̃) L(k̃) is an energy; γ is in m³/s.
//!
//! # Discretisation
//!
//! On a cubic probe grid with spacing h the k̃-integral becomes Σ w·(…)
//! with cell weight w = h³/(2π)³, and δ(k̃+k̃') becomes a Kronecker delta
//! divided by h³. Wiener increments over a step Δt then satisfy
//!
//! ```text
//! E[ΔW(k̃) ΔW(k̃')] = (γ Δt / w) δ_{k̃,−k̃'}
//! ```
//!
//! so E|ΔW(k̃)|² = γΔt/w. For k̃ ≠ 0 the real and imaginary parts each carry
//! half of that variance; the self-mirrored point k̃ = 0 is real. The
//! Monte-Carlo oracle uses exactly this variance.

use std::f64::consts::PI;

use nalgebra::Vector3;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::rng::{stream_rng, StreamRng};

/// CSL collapse rate λ (1/s) and localisation length r_c (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CslParams {
    pub lambda: f64,
    pub r_c: f64,
}

impl CslParams {
    pub fn new(lambda: f64, r_c: f64) -> Result<Self> {
        require_non_negative("lambda", lambda)?;
        require_positive("r_c", r_c)?;
        Ok(CslParams { lambda, r_c })
    }

    /// γ = 8π^{3/2} λ r_c³, m³/s.
    pub fn gamma(&self) -> f64 {
        8.0 * PI.powf(1.5) * self.lambda * self.r_c.powi(3)
    }
}

/// Piecewise-linear spectrum through `(omega[i], gamma[i])`, zero outside
/// the knot range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedSpectrum {
    omega: Vec<f64>,
    gamma: Vec<f64>,
}

impl TabulatedSpectrum {
    pub fn new(omega: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if omega.len() != gamma.len() {
            return Err(Error::invalid("spectrum", "ω and γ columns differ in length"));
        }
        if omega.len() < 2 {
            return Err(Error::invalid("spectrum", "need at least two knots"));
        }
        if omega[0] < 0.0 || omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::invalid("spectrum", "knots must be finite and ≥ 0"));
        }
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("spectrum", "ω knots must be strictly increasing"));
        }
        if gamma.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::invalid("spectrum", "γ values must be finite and ≥ 0"));
        }
        Ok(TabulatedSpectrum { omega, gamma })
    }

    /// Parses two whitespace- or comma-separated columns `ω γ(ω)`.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut omega = Vec::new();
        let mut gamma = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!("line {}: expected 2 columns, got {}", lineno + 1, cols.len())));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)));
            omega.push(parse(cols[0])?);
            gamma.push(parse(cols[1])?);
        }
        Self::new(omega, gamma)
    }

    pub fn knots(&self) -> &[f64] {
        &self.omega
    }

    pub fn values(&self) -> &[f64] {
        &self.gamma
    }

    pub fn max_value(&self) -> f64 {
        self.gamma.iter().copied().fold(0.0, f64::max)
    }

    fn eval(&self, w: f64) -> f64 {
        let n = self.omega.len();
        if w < self.omega[0] || w > self.omega[n - 1] {
            return 0.0;
        }
        let i = match self.omega.binary_search_by(|x| x.total_cmp(&w)) {
            Ok(i) => return self.gamma[i],
            Err(i) => i,
        };
        let (w0, w1) = (self.omega[i - 1], self.omega[i]);
        let s = (w - w0) / (w1 - w0);
        self.gamma[i - 1] + s * (self.gamma[i] - self.gamma[i - 1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SpectrumKind {
    Flat,
    /// γ·θ(Ω − ω), cutoff Ω in rad/s.
    StepCutoff {
        cutoff: f64,
    },
    /// Absolute γ(ω) values in m³/s.
    Tabulated(TabulatedSpectrum),
}

/// Collapse-noise spectrum γ(ω) together with the CSL parameters that set
/// its white-noise level and the r_c used by the heating integral.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseSpectrum {
    pub kind: SpectrumKind,
    pub params: CslParams,
}

impl NoiseSpectrum {
    pub fn flat(params: CslParams) -> Self {
        NoiseSpectrum { kind: SpectrumKind::Flat, params }
    }

    pub fn step_cutoff(params: CslParams, cutoff: f64) -> Result<Self> {
        require_positive("cutoff", cutoff)?;
        Ok(NoiseSpectrum { kind: SpectrumKind::StepCutoff { cutoff }, params })
    }

    pub fn tabulated(params: CslParams, table: TabulatedSpectrum) -> Self {
        NoiseSpectrum { kind: SpectrumKind::Tabulated(table), params }
    }

    /// γ(ω) for ω ≥ 0.
    pub fn value(&self, omega: f64) -> Result<f64> {
        if omega.is_nan() || omega < 0.0 {
            return Err(Error::Domain(format!("spectrum evaluated at ω = {omega}")));
        }
        Ok(self.value_unchecked(omega))
    }

    pub(crate) fn value_unchecked(&self, omega: f64) -> f64 {
        match &self.kind {
            SpectrumKind::Flat => self.params.gamma(),
            SpectrumKind::StepCutoff { cutoff } => {
                if omega < *cutoff {
                    self.params.gamma()
                } else {
                    0.0
                }
            }
            SpectrumKind::Tabulated(t) => t.eval(omega),
        }
    }

    /// Upper bound of γ over ω ≥ 0.
    pub fn max_value(&self) -> f64 {
        match &self.kind {
            SpectrumKind::Flat | SpectrumKind::StepCutoff { .. } => self.params.gamma(),
            SpectrumKind::Tabulated(t) => t.max_value(),
        }
    }

    /// Frequency beyond which γ vanishes, if any.
    pub fn support_end(&self) -> Option<f64> {
        match &self.kind {
            SpectrumKind::Flat => None,
            SpectrumKind::StepCutoff { cutoff } => Some(*cutoff),
            SpectrumKind::Tabulated(t) => t.knots().last().copied(),
        }
    }

    /// Points where γ is discontinuous or has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            SpectrumKind::Flat => Vec::new(),
            SpectrumKind::StepCutoff { cutoff } => vec![*cutoff],
            SpectrumKind::Tabulated(t) => t.knots().to_vec(),
        }
    }

    /// Time correlation f(t) = (1/2π) ∫_{−∞}^{∞} γ(|ω|) e^{−iωt} dω, with the
    /// spectrum extended evenly to negative frequency.
    ///
    /// White noise has f = γ δ(t), which has no pointwise value; callers
    /// must use the white-noise code paths instead.
    pub fn correlation(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("correlation evaluated at t = {t}")));
        }
        match &self.kind {
            SpectrumKind::Flat => Err(Error::Unsupported("white-noise correlation is a delta function; use the white-noise analytic paths".into())),
            SpectrumKind::StepCutoff { cutoff } => {
                let g = self.params.gamma();
                let x = cutoff * t;
                if x.abs() < 1e-4 {
                    // sin(x)/x series
                    Ok(g * cutoff / PI * (1.0 - x * x / 6.0 + x.powi(4) / 120.0))
                } else {
                    Ok(g * x.sin() / (PI * t))
                }
            }
            SpectrumKind::Tabulated(table) => {
                let opts = QuadOptions { rel_tol: 1e-12, abs_tol: 1e-15 * table.max_value(), max_panels: 4000 };
                let mut total = 0.0;
                for seg in table.knots().windows(2) {
                    let r = integrate(|w| table.eval(w) * (w * t).cos(), seg[0], seg[1], opts)?;
                    total += r.value;
                }
                Ok(total / PI)
            }
        }
    }
}

/// Inversion-symmetric set of probe wave-vectors k̃ on a cubic lattice of
/// spacing h, used to discretise the noise field.
#[derive(Debug, Clone)]
pub struct ProbeGrid {
    points: Vec<Vector3<f64>>,
    mirror: Vec<usize>,
    spacing: f64,
}

impl ProbeGrid {
    /// `per_axis` points on each axis covering [−extent/r_c, extent/r_c].
    pub fn cubic(extent: f64, per_axis: usize, r_c: f64) -> Result<Self> {
        require_positive("probe extent", extent)?;
        require_positive("r_c", r_c)?;
        if per_axis < 2 {
            return Err(Error::InvalidSize(format!("probe grid needs ≥ 2 points per axis, got {per_axis}")));
        }
        let k_max = extent / r_c;
        let h = 2.0 * k_max / (per_axis - 1) as f64;
        // symmetric index offsets so that −k̃ is represented bit-exactly
        let half = (per_axis - 1) as f64 / 2.0;
        let coord = |j: usize| (j as f64 - half) * h;
        let mut points = Vec::with_capacity(per_axis.pow(3));
        for i in 0..per_axis {
            for j in 0..per_axis {
                for k in 0..per_axis {
                    points.push(Vector3::new(coord(i), coord(j), coord(k)));
                }
            }
        }
        let n = points.len();
        let mirror = (0..n).map(|i| n - 1 - i).collect();
        Ok(ProbeGrid { points, mirror, spacing: h })
    }

    /// Arbitrary point set with cell spacing `spacing`. Every point must
    /// have its negation in the set.
    pub fn from_points(points: Vec<Vector3<f64>>, spacing: f64) -> Result<Self> {
        require_positive("probe spacing", spacing)?;
        if points.is_empty() {
            return Err(Error::InvalidGrid("no probe points".into()));
        }
        let tol = 1e-9 * spacing;
        let mut mirror = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let j =
                points.iter().position(|q| (q + p).amax() <= tol).ok_or_else(|| Error::InvalidGrid(format!("probe point {i} = {p:?} has no −k̃ partner")))?;
            mirror.push(j);
        }
        Ok(ProbeGrid { points, mirror, spacing })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn mirror_of(&self, i: usize) -> usize {
        self.mirror[i]
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Quadrature weight w = h³/(2π)³ replacing ∫ d³k̃/(2π)³.
    pub fn cell_weight(&self) -> f64 {
        (self.spacing / (2.0 * PI)).powi(3)
    }

    /// E|ΔW(k̃)|² = γ Δt / w.
    pub fn increment_variance(&self, gamma: f64, dt: f64) -> f64 {
        gamma * dt / self.cell_weight()
    }

    /// Indices of one representative per mirror pair (self-mirrored points
    /// included once).
    pub fn half_space(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.mirror[i] >= i).collect()
    }
}

/// Streams white-noise increments ΔW(k̃) one time step at a time.
#[derive(Debug, Clone)]
pub struct WhiteNoiseSampler {
    rng: StreamRng,
    representatives: Vec<usize>,
    mirror: Vec<usize>,
    sd_real: f64,
    sd_complex_part: f64,
}

impl WhiteNoiseSampler {
    pub fn new(params: &CslParams, grid: &ProbeGrid, dt: f64, seed: u64, stream: u64) -> Result<Self> {
        require_positive("dt", dt)?;
        let var = grid.increment_variance(params.gamma(), dt);
        Ok(WhiteNoiseSampler {
            rng: stream_rng(seed, stream),
            representatives: grid.half_space(),
            mirror: grid.mirror.clone(),
            sd_real: var.sqrt(),
            sd_complex_part: (0.5 * var).sqrt(),
        })
    }

    /// Writes one step of increments into `out` (length = grid size).
    pub fn fill(&mut self, out: &mut [Complex64]) {
        debug_assert_eq!(out.len(), self.mirror.len());
        for &i in &self.representatives {
            let j = self.mirror[i];
            if i == j {
                let x: f64 = self.rng.sample(StandardNormal);
                out[i] = Complex64::new(self.sd_real * x, 0.0);
            } else {
                let x: f64 = self.rng.sample(StandardNormal);
                let y: f64 = self.rng.sample(StandardNormal);
                let z = Complex64::new(self.sd_complex_part * x, self.sd_complex_part * y);
                out[i] = z;
                out[j] = z.conj();
            }
        }
    }
}

/// A sampled white-noise path: `steps × grid.len()` increments, step-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub dt: f64,
    pub steps: usize,
    pub points: usize,
    pub increments: Vec<Complex64>,
}

impl NoisePath {
    pub fn step(&self, n: usize) -> &[Complex64] {
        &self.increments[n * self.points..(n + 1) * self.points]
    }
}

/// Synthesises a white-noise path on stream 0 of `seed`.
pub fn synthesize_white_path(params: &CslParams, grid: &ProbeGrid, dt: f64, steps: usize, seed: u64) -> Result<NoisePath> {
    synthesize_white_path_on_stream(params, grid, dt, steps, seed, 0)
}

pub fn synthesize_white_path_on_stream(params: &CslParams, grid: &ProbeGrid, dt: f64, steps: usize, seed: u64, stream: u64) -> Result<NoisePath> {
    if steps == 0 {
        return Err(Error::InvalidSize("noise path needs at least one step".into()));
    }
    let mut sampler = WhiteNoiseSampler::new(params, grid, dt, seed, stream)?;
    let n = grid.len();
    let mut increments = vec![Complex64::new(0.0, 0.0); steps * n];
    for chunk in increments.chunks_mut(n) {
        sampler.fill(chunk);
    }
    Ok(NoisePath { dt, steps, points: n, increments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> CslParams {
        CslParams::new(1e-8, 1e-7).unwrap()
    }

    #[test]
    fn gamma_definition() {
        assert_relative_eq!(params().gamma(), 8.0 * PI.powf(1.5) * 1e-8 * 1e-21, max_relative = 1e-15);
        assert!(CslParams::new(-1.0, 1e-7).is_err());
        assert!(CslParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn spectrum_values() {
        let p = params();
        let flat = NoiseSpectrum::flat(p);
        assert_eq!(flat.value(0.0).unwrap(), p.gamma());
        assert_eq!(flat.value(1e15).unwrap(), p.gamma());
        assert!(matches!(flat.value(-1.0), Err(Error::Domain(_))));

        let step = NoiseSpectrum::step_cutoff(p, 1e9).unwrap();
        assert_eq!(step.value(2e9).unwrap(), 0.0);
        assert_eq!(step.value(5e8).unwrap(), p.gamma());

        let g = 3.0e-29;
        let tab = NoiseSpectrum::tabulated(p, TabulatedSpectrum::new(vec![0.0, 1e9], vec![g, g]).unwrap());
        assert_eq!(tab.value(5e8).unwrap(), g);
        assert_eq!(tab.value(2e9).unwrap(), 0.0);
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let t = TabulatedSpectrum::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(2.0), 1.0);
        assert_eq!(t.eval(1.0), 2.0);
        assert_eq!(t.eval(3.5), 0.0);
        assert!(TabulatedSpectrum::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(TabulatedSpectrum::new(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn tabulated_file_parsing() {
        let text = "# omega gamma\n0 1e-29\n1e9, 2e-29\n\n2e9 0 # end\n";
        let t = TabulatedSpectrum::parse(text).unwrap();
        assert_eq!(t.knots(), &[0.0, 1e9, 2e9]);
        assert!(matches!(TabulatedSpectrum::parse("1 2 3\n"), Err(Error::Parse(_))));
        assert!(matches!(TabulatedSpectrum::parse("1 x\n2 3\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn step_correlation() {
        let p = params();
        let omega = 1e9;
        let s = NoiseSpectrum::step_cutoff(p, omega).unwrap();
        // sin(Ωt)/(πt) → Ω/π as t → 0
        assert_relative_eq!(s.correlation(0.0).unwrap(), p.gamma() * omega / PI, max_relative = 1e-15);
        assert_relative_eq!(s.correlation(1e-15).unwrap(), p.gamma() * omega / PI, max_relative = 1e-10);
        assert!(s.correlation(PI / omega).unwrap().abs() < 1e-15 * p.gamma() * omega);
        assert!(matches!(NoiseSpectrum::flat(p).correlation(1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn tabulated_correlation_matches_closed_form() {
        // a flat table on [0, Ω] is the step spectrum
        let p = params();
        let omega = 2.0;
        let tab = NoiseSpectrum::tabulated(p, TabulatedSpectrum::new(vec![0.0, omega], vec![p.gamma(); 2]).unwrap());
        let step = NoiseSpectrum::step_cutoff(p, omega).unwrap();
        for t in [0.0, 0.3, 1.7, 5.0] {
            assert_relative_eq!(tab.correlation(t).unwrap(), step.correlation(t).unwrap(), epsilon = 1e-12 * p.gamma(), max_relative = 1e-10);
        }
    }

    #[test]
    fn cubic_probe_grid_is_inversion_symmetric() {
        let g = ProbeGrid::cubic(4.0, 5, 1e-7).unwrap();
        assert_eq!(g.len(), 125);
        for (i, p) in g.points().iter().enumerate() {
            assert_eq!(g.points()[g.mirror_of(i)], -p);
        }
        assert_eq!(g.half_space().len(), 63);
        assert_relative_eq!(g.spacing(), 2e7, max_relative = 1e-14);
        assert!(ProbeGrid::cubic(4.0, 1, 1e-7).is_err());
    }

    #[test]
    fn grid_without_partner_is_rejected() {
        let pts = vec![Vector3::new(1.0, 0.0, 0.0), Vector3::new(-1.0, 0.0, 0.0), Vector3::new(0.0, 2.0, 0.0)];
        assert!(matches!(ProbeGrid::from_points(pts.clone(), 1.0), Err(Error::InvalidGrid(_))));
        let g = ProbeGrid::from_points(pts[..2].to_vec(), 1.0).unwrap();
        assert!(synthesize_white_path(&params(), &g, 1.0, 1, 0).is_ok());
    }

    #[test]
    fn path_is_deterministic_and_mirrored() {
        let p = params();
        let g = ProbeGrid::cubic(3.0, 4, p.r_c).unwrap();
        let a = synthesize_white_path(&p, &g, 1e-15, 20, 42).unwrap();
        let b = synthesize_white_path(&p, &g, 1e-15, 20, 42).unwrap();
        let c = synthesize_white_path(&p, &g, 1e-15, 20, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        for n in 0..a.steps {
            let s = a.step(n);
            for i in 0..g.len() {
                assert_eq!(s[g.mirror_of(i)], s[i].conj());
            }
        }
    }

    #[test]
    fn zero_lambda_gives_zero_path() {
        let p = CslParams::new(0.0, 1e-7).unwrap();
        let g = ProbeGrid::cubic(2.0, 3, p.r_c).unwrap();
        let path = synthesize_white_path(&p, &g, 1e-15, 5, 1).unwrap();
        assert!(path.increments.iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn increment_statistics() {
        // 3σ checks over 1e5 draws against the documented discrete variance
        let p = params();
        let g = ProbeGrid::cubic(2.0, 3, p.r_c).unwrap(); // 27 points, centre self-mirrored
        let dt = 1e-12;
        let steps = 100_000;
        let path = synthesize_white_path(&p, &g, dt, steps, 2024).unwrap();
        let var = g.increment_variance(p.gamma(), dt);
        let n = steps as f64;

        let centre = 13;
        assert_eq!(g.mirror_of(centre), centre);
        let a = 0;
        let b = 1; // distinct, not mirror partners
        assert_ne!(g.mirror_of(a), b);

        let (mut m_re, mut s_re, mut s_c, mut corr_ab, mut s_ab2) = (0.0, 0.0, 0.0, Complex64::new(0.0, 0.0), 0.0);
        for k in 0..steps {
            let s = path.step(k);
            m_re += s[a].re;
            s_re += s[a].re * s[a].re;
            s_c += s[centre].re * s[centre].re;
            let prod = s[a] * s[b];
            corr_ab += prod;
            s_ab2 += prod.norm_sqr();
        }
        // Re part of a non-centre point: variance var/2, var of the sample variance = 2σ⁴/n
        let target = 0.5 * var;
        let est = s_re / n;
        assert!((est - target).abs() < 3.0 * target * (2.0 / n).sqrt(), "{est} vs {target}");
        // centre point is real with the full variance
        let est_c = s_c / n;
        assert!((est_c - var).abs() < 3.0 * var * (2.0 / n).sqrt(), "{est_c} vs {var}");
        // mean
        assert!((m_re / n).abs() < 3.0 * target.sqrt() / n.sqrt());
        // pair correlation of unrelated points
        let sd = (s_ab2 / n).sqrt() / n.sqrt();
        assert!((corr_ab / n).norm() < 3.0 * sd);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn gamma_scales_as_lambda_rc_cubed(l in 1e-12f64..1e-4, rc in 1e-9f64..1e-5, s in 0.1f64..10.0) {
            let g = CslParams::new(l, rc).unwrap().gamma();
            let g_l = CslParams::new(s * l, rc).unwrap().gamma();
            let g_r = CslParams::new(l, s * rc).unwrap().gamma();
            prop_assert!((g_l / (s * g) - 1.0).abs() < 1e-14);
            prop_assert!((g_r / (s.powi(3) * g) - 1.0).abs() < 1e-13);
        }

        #[test]
        fn flat_is_constant_and_step_non_increasing(w1 in 0.0f64..1e12, w2 in 0.0f64..1e12, cut in 1.0f64..1e12) {
            let p = CslParams::new(1e-8, 1e-7).unwrap();
            let flat = NoiseSpectrum::flat(p);
            prop_assert_eq!(flat.value(w1).unwrap(), flat.value(w2).unwrap());
            let step = NoiseSpectrum::step_cutoff(p, cut).unwrap();
            let (lo, hi) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
            prop_assert!(step.value(lo).unwrap() >= step.value(hi).unwrap());
        }
    }
}
