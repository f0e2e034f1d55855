//! Collapse-driven heating rates.
//!
//! White noise heats a crystal uniformly at
//!
//! ```text
//! q̇_w = 3ħ²λρ / (4 m₀² r_c²)
//! ```
//!
//! and a general spectrum, after the Debye/long-wave reduction to the LA
//! branch, at
//!
//! ```text
//! q̇_nw = ħ²ρ / (4π² m₀² v_eff⁵) ∫₀^∞ ω⁴ e^{−ω² r_c²/v_eff²} γ(ω) dω
//! ```
//!
//! The integral is evaluated in x = ω r_c/v_eff, where it reads
//! (v_eff/r_c)⁵ ∫ x⁴ e^{−x²} γ(x v_eff/r_c) dx.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::materials::{Material, AMU, HBAR};
use crate::noise::{CslParams, NoiseSpectrum};
use crate::quadrature::{integrate_with_breaks, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RateMethod {
    WhiteAnalytic,
    NonWhiteQuadrature,
    McEstimate,
}

impl RateMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            RateMethod::WhiteAnalytic => "white-analytic",
            RateMethod::NonWhiteQuadrature => "nonwhite-quadrature",
            RateMethod::McEstimate => "mc-estimate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatingRate {
    /// W/m³
    pub q_dot: f64,
    /// W/kg
    pub power_per_mass: f64,
    pub method: RateMethod,
    /// Absolute uncertainty of `q_dot`, W/m³.
    pub error_estimate: f64,
}

impl HeatingRate {
    pub fn new(q_dot: f64, density: f64, method: RateMethod, error_estimate: f64) -> Self {
        HeatingRate { q_dot, power_per_mass: q_dot / density, method, error_estimate }
    }

    /// Total power dissipated in a body of the given volume, W.
    pub fn power_in_volume(&self, volume: f64) -> f64 {
        self.q_dot * volume
    }

    /// Total power dissipated in a body of the given mass, W.
    pub fn power_in_mass(&self, mass: f64) -> f64 {
        self.power_per_mass * mass
    }
}

/// 3ħ²λ / (4 m₀² r_c²), the white-noise heating power per kilogram.
pub fn white_power_per_mass(params: &CslParams) -> f64 {
    3.0 * HBAR * HBAR * params.lambda / (4.0 * AMU * AMU * params.r_c * params.r_c)
}

/// q̇_w = 3ħ²λρ / (4 m₀² r_c²).
pub fn rate_white(params: &CslParams, mat: &Material) -> HeatingRate {
    let q = white_power_per_mass(params) * mat.density;
    HeatingRate::new(q, mat.density, RateMethod::WhiteAnalytic, 0.0)
}

/// Energy gained by a crystal of total mass 𝓜 after time t under white
/// noise: ΔE = t·3ħ²λ𝓜/(4m₀²r_c²).
pub fn energy_growth_white(params: &CslParams, total_mass: f64, t: f64) -> Result<f64> {
    require_non_negative("t", t)?;
    require_non_negative("total_mass", total_mass)?;
    Ok(t * white_power_per_mass(params) * total_mass)
}

/// ∫₀^∞ x⁴ e^{−x²} dx = 3√π/8.
pub const GAUSSIAN_FOURTH_MOMENT: f64 = 0.664_670_194_089_568_5;

/// Upper bound on ∫_X^∞ x⁴ e^{−x²} dx for X > 0 (integration by parts plus
/// erfc(X) ≤ e^{−X²}/(X√π)).
pub fn gaussian_moment_tail_bound(x: f64) -> f64 {
    (-x * x).exp() * (0.5 * x.powi(3) + 0.75 * x + 0.375 / x)
}

/// Dimensionless ratio q̇_nw/q̇_w for the step cutoff in the Ω ≪ v_eff/r_c
/// limit: 8 (Ω r_c/v_eff)⁵ / (15√π).
pub fn step_cutoff_low_limit(cutoff_ratio: f64) -> f64 {
    8.0 * cutoff_ratio.powi(5) / (15.0 * PI.sqrt())
}

fn prefactor(mat: &Material, r_c: f64) -> f64 {
    // ħ²ρ/(4π²m₀²v⁵) · (v/r_c)⁵
    HBAR * HBAR * mat.density / (4.0 * PI * PI * AMU * AMU * r_c.powi(5))
}

/// Dimensionless ∫ x⁴ e^{−x²} γ(x v/r_c)/γ_ref dx over `[0, x_end]` with
/// absolute error.
fn spectral_moment(spectrum: &NoiseSpectrum, scale: f64, gamma_ref: f64, x_end: f64, tol: f64) -> Result<(f64, f64)> {
    let mut breaks = vec![0.0];
    breaks.extend(spectrum.breakpoints().into_iter().map(|w| w / scale).filter(|&x| x > 0.0 && x < x_end));
    breaks.push(x_end);
    breaks.sort_by(f64::total_cmp);
    let f = |x: f64| x.powi(4) * (-x * x).exp() * spectrum.value_unchecked(x * scale) / gamma_ref;
    let opts = QuadOptions { rel_tol: 0.1 * tol, abs_tol: 0.0, max_panels: 5000 };
    let r = integrate_with_breaks(f, &breaks, opts)?;
    Ok((r.value, r.abs_error))
}

/// q̇_nw for an arbitrary spectrum, to relative tolerance `tol`.
pub fn rate_nonwhite(spectrum: &NoiseSpectrum, mat: &Material, tol: f64) -> Result<HeatingRate> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::invalid("tol", format!("must lie in (0, 1e-3], got {tol}")));
    }
    mat.validate()?;
    let r_c = spectrum.params.r_c;
    let scale = mat.v_eff / r_c; // ω = x·scale
    let gamma_ref = spectrum.max_value();
    if gamma_ref == 0.0 {
        return Ok(HeatingRate::new(0.0, mat.density, RateMethod::NonWhiteQuadrature, 0.0));
    }
    let support = spectrum.support_end().map(|w| w / scale);

    // Start at the envelope cut e^{−X²} = tol and extend until the tail
    // bound is below 1% of the requested accuracy.
    let mut x_end = (1.0 / tol).ln().sqrt();
    loop {
        let (x_hi, tail) = match support {
            Some(s) if s <= x_end => (s, 0.0),
            _ => (x_end, gaussian_moment_tail_bound(x_end)),
        };
        let (value, quad_err) = match spectral_moment(spectrum, scale, gamma_ref, x_hi, tol) {
            Ok(v) => v,
            Err(Error::Accuracy { estimate, abs_error }) => {
                let p = prefactor(mat, r_c) * gamma_ref;
                return Err(Error::Accuracy { estimate: p * estimate, abs_error: p * abs_error });
            }
            Err(e) => return Err(e),
        };
        if tail <= 0.01 * tol * value || tail == 0.0 {
            let p = prefactor(mat, r_c) * gamma_ref;
            let q = p * value;
            let err = p * (quad_err + tail);
            if err > tol * q {
                return Err(Error::Accuracy { estimate: q, abs_error: err });
            }
            return Ok(HeatingRate::new(q, mat.density, RateMethod::NonWhiteQuadrature, err));
        }
        if x_end > 40.0 {
            // e^{−1600}: only a spectrum that is essentially zero below the
            // envelope can get here
            let p = prefactor(mat, r_c) * gamma_ref;
            return Err(Error::Accuracy { estimate: p * value, abs_error: p * (quad_err + tail) });
        }
        x_end += 0.5;
    }
}

/// Non-white rate with the integral stopped at the Debye frequency instead
/// of infinity, and the relative effect of that truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DebyeTruncation {
    pub to_infinity: HeatingRate,
    pub to_debye: HeatingRate,
    /// (to_infinity − to_debye)/to_infinity
    pub relative_difference: f64,
}

pub fn rate_nonwhite_debye_check(spectrum: &NoiseSpectrum, mat: &Material, tol: f64) -> Result<DebyeTruncation> {
    let full = rate_nonwhite(spectrum, mat, tol)?;
    let r_c = spectrum.params.r_c;
    require_positive("r_c", r_c)?;
    let scale = mat.v_eff / r_c;
    let gamma_ref = spectrum.max_value();
    let to_debye = if gamma_ref == 0.0 {
        HeatingRate::new(0.0, mat.density, RateMethod::NonWhiteQuadrature, 0.0)
    } else {
        let x_d = mat.debye_frequency() / scale;
        let x_hi = spectrum.support_end().map_or(x_d, |s| (s / scale).min(x_d));
        // beyond ~40 the integrand underflows; integrating further only adds panels
        let x_hi = x_hi.min(40.0);
        let (value, err) = spectral_moment(spectrum, scale, gamma_ref, x_hi, tol)?;
        let p = prefactor(mat, r_c) * gamma_ref;
        HeatingRate::new(p * value, mat.density, RateMethod::NonWhiteQuadrature, p * err)
    };
    let relative_difference = if full.q_dot > 0.0 { (full.q_dot - to_debye.q_dot) / full.q_dot } else { 0.0 };
    Ok(DebyeTruncation { to_infinity: full, to_debye, relative_difference })
}
