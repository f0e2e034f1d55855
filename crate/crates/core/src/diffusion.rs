//! Steady-state temperature under uniform volumetric heating q̇ with
//! conductivity k = k₀T, fixed surface temperature T_s and a symmetric
//! (adiabatic) centre:
//!
//! ```text
//! (k₀/rⁿ) d/dr (rⁿ T dT/dr) + q̇ = 0,   T(L) = T_s,   T'(0) = 0
//! ```
//!
//! with n = 2 (sphere), 1 (cylinder), 0 (slab, r measured from the
//! mid-plane). Since T T' = (T²/2)', the exact solution is
//!
//! ```text
//! T(r) = T_s √(1 + x (1 − r²/L²)),   x = q̇ ℓ² / ((n+1) k₀ T_s²)
//! ```
//!
//! and its linearisation T_s + (x T_s/2)(1 − r²/L²) coincides with the
//! constant-conductivity result at k = k₀T_s. The linearised core rise is
//! q̇ℓ²/(6k₀T_s), q̇ℓ²/(4k₀T_s) and q̇ℓ²/(2k₀T_s) for sphere, cylinder and
//! slab, so a slab runs three times hotter than a sphere of the same size.
//!
//! # Length scaling
//!
//! ℓ² is L² in [`LengthScaling::Physical`]. [`LengthScaling::Reference`]
//! uses ℓ² = 1 m² independent of the body's size, which is the convention
//! behind the quoted core rises T_c − T_s ≈ 200λ (Cu) and ≈ 10⁴λ (TeO₂).
//! The radial shape is the same in both; only the load x differs.

use serde::Serialize;

use crate::error::{require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Geometry {
    Sphere {
        radius: f64,
    },
    Cylinder {
        radius: f64,
    },
    /// Plane wall of thickness 2·half_width.
    Slab {
        half_width: f64,
    },
}

impl Geometry {
    pub fn characteristic_length(&self) -> f64 {
        match *self {
            Geometry::Sphere { radius } | Geometry::Cylinder { radius } => radius,
            Geometry::Slab { half_width } => half_width,
        }
    }

    /// n in the rⁿ radial weight.
    pub fn radial_exponent(&self) -> u32 {
        match self {
            Geometry::Sphere { .. } => 2,
            Geometry::Cylinder { .. } => 1,
            Geometry::Slab { .. } => 0,
        }
    }

    /// Linearised core rise in units of q̇ℓ²/(k₀T_s): 1/(2(n+1)).
    pub fn shape_factor(&self) -> f64 {
        1.0 / (2.0 * (self.radial_exponent() + 1) as f64)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("characteristic length", self.characteristic_length())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Sphere { .. } => "sphere",
            Geometry::Cylinder { .. } => "cylinder",
            Geometry::Slab { .. } => "slab",
        }
    }

    /// Parses `sphere:R`, `cylinder:R` or `slab:L` with lengths in metres.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, len) = spec.split_once(':').ok_or_else(|| Error::Parse(format!("geometry `{spec}`: expected KIND:LENGTH")))?;
        let len: f64 = len.trim().parse().map_err(|e| Error::Parse(format!("geometry length `{len}`: {e}")))?;
        let g = match kind.trim() {
            "sphere" => Geometry::Sphere { radius: len },
            "cylinder" => Geometry::Cylinder { radius: len },
            "slab" => Geometry::Slab { half_width: len },
            other => return Err(Error::Parse(format!("unknown geometry `{other}`"))),
        };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum LengthScaling {
    #[default]
    Reference,
    Physical,
}

impl LengthScaling {
    /// ℓ², m².
    pub fn length_squared(&self, geometry: &Geometry) -> f64 {
        match self {
            LengthScaling::Reference => 1.0,
            LengthScaling::Physical => geometry.characteristic_length().powi(2),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "reference" => Ok(LengthScaling::Reference),
            "physical" => Ok(LengthScaling::Physical),
            other => Err(Error::Parse(format!("unknown length scaling `{other}` (reference|physical)"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LengthScaling::Reference => "reference",
            LengthScaling::Physical => "physical",
        }
    }
}

/// Surface temperature, source and conductivity coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalLoad {
    /// K
    pub t_s: f64,
    /// W/m³
    pub q_dot: f64,
    /// W/(m·K²)
    pub k0: f64,
}

impl ThermalLoad {
    pub fn new(t_s: f64, q_dot: f64, k0: f64) -> Result<Self> {
        require_positive("T_s", t_s)?;
        require_positive("k0", k0)?;
        if !(q_dot.is_finite() && q_dot >= 0.0) {
            return Err(Error::invalid("q_dot", format!("must be finite and ≥ 0, got {q_dot}")));
        }
        Ok(ThermalLoad { t_s, q_dot, k0 })
    }

    /// x = q̇ℓ²/((n+1)k₀T_s²).
    pub fn load_parameter(&self, geometry: &Geometry, scaling: LengthScaling) -> f64 {
        let n1 = (geometry.radial_exponent() + 1) as f64;
        self.q_dot * scaling.length_squared(geometry) / (n1 * self.k0 * self.t_s * self.t_s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub r: f64,
    pub t_exact: f64,
    pub t_linearized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemperatureProfile {
    pub geometry: Geometry,
    pub scaling: LengthScaling,
    pub t_s: f64,
    pub q_dot: f64,
    pub k0: f64,
    pub samples: Vec<ProfileSample>,
    pub core_delta_exact: f64,
    pub core_delta_linearized: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoreTemperature {
    pub exact: f64,
    pub linearized: f64,
    pub delta_exact: f64,
    pub delta_linearized: f64,
}

/// Closed-form T(r) and its linearisation at radius `r` ∈ [0, L].
pub fn temperature_at(load: &ThermalLoad, geometry: &Geometry, scaling: LengthScaling, r: f64) -> (f64, f64) {
    let x = load.load_parameter(geometry, scaling);
    let l = geometry.characteristic_length();
    let shape = 1.0 - (r / l) * (r / l);
    let exact = load.t_s * (1.0 + x * shape).sqrt();
    let lin = load.t_s + 0.5 * x * load.t_s * shape;
    (exact, lin)
}

/// T_s(√(1+x) − 1), written to avoid cancellation for tiny x.
fn sqrt_rise(t_s: f64, x: f64) -> f64 {
    t_s * x / ((1.0 + x).sqrt() + 1.0)
}

pub fn core_temperature(load: &ThermalLoad, geometry: &Geometry, scaling: LengthScaling) -> Result<CoreTemperature> {
    geometry.validate()?;
    let x = load.load_parameter(geometry, scaling);
    let delta_exact = sqrt_rise(load.t_s, x);
    let delta_linearized = 0.5 * x * load.t_s;
    Ok(CoreTemperature { exact: load.t_s + delta_exact, linearized: load.t_s + delta_linearized, delta_exact, delta_linearized })
}

/// Samples the closed-form profile at `n_samples` radii uniform on [0, L].
pub fn profile(load: &ThermalLoad, geometry: &Geometry, scaling: LengthScaling, n_samples: usize) -> Result<TemperatureProfile> {
    geometry.validate()?;
    if n_samples < 2 {
        return Err(Error::InvalidSize(format!("profile needs ≥ 2 samples, got {n_samples}")));
    }
    let l = geometry.characteristic_length();
    let samples = (0..n_samples)
        .map(|j| {
            let r = if j + 1 == n_samples { l } else { l * j as f64 / (n_samples - 1) as f64 };
            let (t_exact, t_linearized) = temperature_at(load, geometry, scaling, r);
            ProfileSample { r, t_exact, t_linearized }
        })
        .collect();
    let core = core_temperature(load, geometry, scaling)?;
    Ok(TemperatureProfile {
        geometry: *geometry,
        scaling,
        t_s: load.t_s,
        q_dot: load.q_dot,
        k0: load.k0,
        samples,
        core_delta_exact: core.delta_exact,
        core_delta_linearized: core.delta_linearized,
    })
}

/// Sphere of radius `r0` in the reference length scaling.
pub fn profile_sphere(t_s: f64, q_dot: f64, k0: f64, r0: f64, n_samples: usize) -> Result<TemperatureProfile> {
    let load = ThermalLoad::new(t_s, q_dot, k0)?;
    profile(&load, &Geometry::Sphere { radius: r0 }, LengthScaling::Reference, n_samples)
}

/// Finite-difference solution of the nonlinear boundary-value problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BvpSolution {
    pub radii: Vec<f64>,
    pub temperature: Vec<f64>,
    pub newton_iterations: usize,
    /// max |row residual| in the scaled units of [`solve_bvp_oracle`].
    pub residual: f64,
}

impl BvpSolution {
    pub fn core_delta(&self, t_s: f64) -> f64 {
        self.temperature[0] - t_s
    }

    /// max_i |T_i − T_ref(r_i)| / T_ref(r_i)
    pub fn max_relative_deviation(&self, reference: impl Fn(f64) -> f64) -> f64 {
        self.radii
            .iter()
            .zip(&self.temperature)
            .map(|(&r, &t)| {
                let t_ref = reference(r);
                ((t - t_ref) / t_ref).abs()
            })
            .fold(0.0, f64::max)
    }
}

pub const BVP_MIN_MESH: usize = 64;
const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 100;

/// Solves the boundary-value problem on `mesh` uniform intervals with
/// damped Newton iteration, independently of the closed form.
///
/// Unknowns are θ = T/T_s at x = r/L. Interior rows are the expanded
/// operator θθ'' + θ'² + (n/x)θθ' + σ = 0 with second-order central
/// differences, multiplied through by h²; σ = q̇ℓ²/(k₀T_s²). At x = 0 the
/// symmetry expansion (n/x)θ' → nθ'' with a mirrored ghost node gives
/// 2(n+1)θ₀(θ₁ − θ₀) + σh² = 0. The scheme is second order in h; the
/// reported residual is the max row residual in these h²-scaled units.
pub fn solve_bvp_oracle(load: &ThermalLoad, geometry: &Geometry, scaling: LengthScaling, mesh: usize) -> Result<BvpSolution> {
    geometry.validate()?;
    if mesh < BVP_MIN_MESH {
        return Err(Error::InvalidSize(format!("BVP mesh must be ≥ {BVP_MIN_MESH}, got {mesh}")));
    }
    let n = geometry.radial_exponent() as f64;
    let sigma = load.q_dot * scaling.length_squared(geometry) / (load.k0 * load.t_s * load.t_s);
    let h = 1.0 / mesh as f64;
    let src = sigma * h * h;
    // unknowns θ_0..θ_{mesh-1}; θ_mesh = 1
    let m = mesh;
    let mut theta = vec![1.0; m + 1];

    let residual = |th: &[f64], out: &mut [f64]| {
        out[0] = 2.0 * (n + 1.0) * th[0] * (th[1] - th[0]) + src;
        for i in 1..m {
            let (a, b, c) = (th[i - 1], th[i], th[i + 1]);
            let w = n / (2.0 * i as f64);
            out[i] = b * (c - 2.0 * b + a) + 0.25 * (c - a) * (c - a) + w * b * (c - a) + src;
        }
    };
    let max_abs = |v: &[f64]| v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));

    let mut f = vec![0.0; m];
    residual(&theta, &mut f);
    let mut res = max_abs(&f);
    let mut iterations = 0;
    let (mut lower, mut diag, mut upper, mut rhs) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut trial = theta.clone();
    let mut f_trial = vec![0.0; m];

    while res > NEWTON_TOL {
        if iterations == NEWTON_MAX_ITER {
            return Err(Error::Numeric(format!(
                "BVP Newton iteration did not converge after {iterations} steps (residual {res:e}, σ = {sigma:e}, mesh {mesh})"
            )));
        }
        iterations += 1;
        // Jacobian rows
        diag[0] = 2.0 * (n + 1.0) * (theta[1] - 2.0 * theta[0]);
        upper[0] = 2.0 * (n + 1.0) * theta[0];
        for i in 1..m {
            let (a, b, c) = (theta[i - 1], theta[i], theta[i + 1]);
            let w = n / (2.0 * i as f64);
            lower[i] = b - 0.5 * (c - a) - w * b;
            diag[i] = (c - 2.0 * b + a) - 2.0 * b + w * (c - a);
            upper[i] = b + 0.5 * (c - a) + w * b; // multiplies θ_{i+1}; fixed at the wall
        }
        for i in 0..m {
            rhs[i] = -f[i];
        }
        let delta = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;

        let mut step = 1.0;
        loop {
            for i in 0..m {
                trial[i] = theta[i] + step * delta[i];
            }
            trial[m] = 1.0;
            residual(&trial, &mut f_trial);
            let r_trial = max_abs(&f_trial);
            if r_trial < res || step < 1e-4 {
                if r_trial >= res && res > NEWTON_TOL {
                    return Err(Error::Numeric(format!("BVP Newton line search stalled at residual {res:e} (σ = {sigma:e}, mesh {mesh})")));
                }
                std::mem::swap(&mut theta, &mut trial);
                std::mem::swap(&mut f, &mut f_trial);
                res = r_trial;
                break;
            }
            step *= 0.5;
        }
    }

    let l = geometry.characteristic_length();
    let radii = (0..=m).map(|i| if i == m { l } else { l * i as f64 * h }).collect();
    let temperature = theta.iter().map(|t| t * load.t_s).collect();
    Ok(BvpSolution { radii, temperature, newton_iterations: iterations, residual: res })
}

/// Thomas algorithm; `lower[0]` and `upper[n-1]` are ignored.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(Error::Numeric("singular Jacobian in BVP solve".into()));
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * c[i - 1];
        if denom == 0.0 {
            return Err(Error::Numeric("singular Jacobian in BVP solve".into()));
        }
        c[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn profile_is_monotone_and_bounded(t_s in 1e-3f64..1.0, x in 0.0f64..0.99, k0 in 0.1f64..500.0, r0 in 1e-3f64..1.0) {
            let q = 3.0 * k0 * t_s * t_s * x;
            let p = profile(&ThermalLoad::new(t_s, q, k0).unwrap(), &Geometry::Sphere { radius: r0 }, LengthScaling::Reference, 33).unwrap();
            for w in p.samples.windows(2) {
                prop_assert!(w[1].t_exact <= w[0].t_exact);
            }
            for s in &p.samples {
                // √(1+y) ≤ 1 + y/2 and the gap is at most y²/8
                prop_assert!(s.t_linearized >= s.t_exact);
                prop_assert!(s.t_linearized - s.t_exact <= x * x / 8.0 * t_s * (1.0 + 1e-12) + 1e-15 * t_s);
            }
            // first-order agreement of the core rises
            if x > 0.0 {
                let rel = (p.core_delta_linearized - p.core_delta_exact) / p.core_delta_linearized;
                prop_assert!(rel <= q / (6.0 * k0 * t_s * t_s));
            }
        }

        #[test]
        fn slab_to_sphere_ratio_is_three(t_s in 1e-3f64..1.0, q in 0.0f64..1e3, k0 in 0.1f64..500.0, l in 1e-3f64..1.0) {
            let load = ThermalLoad::new(t_s, q, k0).unwrap();
            for scaling in [LengthScaling::Reference, LengthScaling::Physical] {
                let s = core_temperature(&load, &Geometry::Sphere { radius: l }, scaling).unwrap().delta_linearized;
                let w = core_temperature(&load, &Geometry::Slab { half_width: l }, scaling).unwrap().delta_linearized;
                if q > 0.0 {
                    prop_assert!((w / s - 3.0).abs() <= 1e-14);
                }
            }
        }
    }
}
