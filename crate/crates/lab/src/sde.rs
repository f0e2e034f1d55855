//! Linear SDEs dX = (A X + a) dt + Σ_j (B^j X + b_j) dW^j and the
//! Stratonovich ↔ Itô drift correction
//!
//! ```text
//! A ← A ± ½ Σ_j B^j B^j,   a ← a ± ½ Σ_j B^j b_j
//! ```
//!
//! (+ going from Stratonovich to Itô). Diffusion terms are unchanged.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use csl_heat::rng::stream_rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSde {
    pub a_mat: DMatrix<f64>,
    pub a_vec: DVector<f64>,
    pub b_mats: Vec<DMatrix<f64>>,
    pub b_vecs: Vec<DVector<f64>>,
}

impl LinearSde {
    pub fn new(a_mat: DMatrix<f64>, a_vec: DVector<f64>, b_mats: Vec<DMatrix<f64>>, b_vecs: Vec<DVector<f64>>) -> Result<Self> {
        let s = LinearSde { a_mat, a_vec, b_mats, b_vecs };
        s.validate()?;
        Ok(s)
    }

    /// State dimension d.
    pub fn dim(&self) -> usize {
        self.a_vec.len()
    }

    /// Number of drivers m.
    pub fn drivers(&self) -> usize {
        self.b_mats.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::input("SDE state dimension must be ≥ 1"));
        }
        if self.a_mat.shape() != (d, d) {
            return Err(Error::input(format!("A has shape {:?}, expected ({d}, {d})", self.a_mat.shape())));
        }
        if self.b_mats.len() != self.b_vecs.len() {
            return Err(Error::input(format!("{} B matrices but {} b vectors", self.b_mats.len(), self.b_vecs.len())));
        }
        for (j, (bm, bv)) in self.b_mats.iter().zip(&self.b_vecs).enumerate() {
            if bm.shape() != (d, d) || bv.len() != d {
                return Err(Error::input(format!("driver {j}: B^j must be {d}×{d} and b_j length {d}")));
            }
        }
        Ok(())
    }

    fn corrected(&self, sign: f64) -> LinearSde {
        let d = self.dim();
        let mut da = DMatrix::zeros(d, d);
        let mut dv = DVector::zeros(d);
        for (bm, bv) in self.b_mats.iter().zip(&self.b_vecs) {
            da += bm * bm;
            dv += bm * bv;
        }
        LinearSde { a_mat: &self.a_mat + da * (0.5 * sign), a_vec: &self.a_vec + dv * (0.5 * sign), b_mats: self.b_mats.clone(), b_vecs: self.b_vecs.clone() }
    }
}

pub fn strat_to_ito(sde: &LinearSde) -> LinearSde {
    sde.corrected(1.0)
}

pub fn ito_to_strat(sde: &LinearSde) -> LinearSde {
    sde.corrected(-1.0)
}

fn drift(s: &LinearSde, x: &DVector<f64>) -> DVector<f64> {
    &s.a_mat * x + &s.a_vec
}

fn diffusion(s: &LinearSde, x: &DVector<f64>, dw: &[f64]) -> DVector<f64> {
    let mut out = DVector::zeros(x.len());
    for ((bm, bv), w) in s.b_mats.iter().zip(&s.b_vecs).zip(dw) {
        out += (bm * x + bv) * *w;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Euler–Maruyama; converges to the Itô solution.
    EulerMaruyama,
    /// Stochastic Heun predictor–corrector; converges to the Stratonovich
    /// solution.
    Heun,
}

/// Mean of X(t) over `paths` sample paths. Path n uses stream n of `seed`.
pub fn simulate_mean(sde: &LinearSde, scheme: Scheme, x0: &DVector<f64>, t: f64, steps: usize, paths: usize, seed: u64) -> Result<DVector<f64>> {
    sde.validate()?;
    if x0.len() != sde.dim() || steps == 0 || paths == 0 {
        return Err(Error::input("x0 must match the SDE dimension; steps and paths must be ≥ 1"));
    }
    let h = t / steps as f64;
    let sq = h.sqrt();
    let m = sde.drivers();
    let finals: Vec<DVector<f64>> = (0..paths)
        .into_par_iter()
        .map(|n| {
            let mut rng = stream_rng(seed, n as u64);
            let mut x = x0.clone();
            let mut dw = vec![0.0; m];
            for _ in 0..steps {
                for w in dw.iter_mut() {
                    *w = sq * rng.sample::<f64, _>(StandardNormal);
                }
                x = match scheme {
                    Scheme::EulerMaruyama => &x + drift(sde, &x) * h + diffusion(sde, &x, &dw),
                    Scheme::Heun => {
                        let f0 = drift(sde, &x);
                        let g0 = diffusion(sde, &x, &dw);
                        let pred = &x + &f0 * h + &g0;
                        &x + (f0 + drift(sde, &pred)) * (0.5 * h) + (g0 + diffusion(sde, &pred, &dw)) * 0.5
                    }
                };
            }
            x
        })
        .collect();
    let mut mean = DVector::zeros(sde.dim());
    for x in &finals {
        mean += x;
    }
    Ok(mean / paths as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(a: f64, beta: f64, b: f64) -> LinearSde {
        LinearSde::new(
            DMatrix::from_element(1, 1, a),
            DVector::from_element(1, 0.0),
            vec![DMatrix::from_element(1, 1, beta)],
            vec![DVector::from_element(1, b)],
        )
        .unwrap()
    }

    #[test]
    fn scalar_correction() {
        let ito = strat_to_ito(&scalar(-0.25, 0.5, 0.0));
        assert_eq!(ito.a_mat[(0, 0)], -0.125);
        assert_eq!(ito.a_vec[0], 0.0);
        let with_b = strat_to_ito(&scalar(0.0, 0.5, 2.0));
        assert_eq!(with_b.a_vec[0], 0.5);
        assert_eq!(ito_to_strat(&with_b), scalar(0.0, 0.5, 2.0));
    }

    #[test]
    fn additive_noise_is_unchanged() {
        let s =
            LinearSde::new(DMatrix::identity(2, 2), DVector::from_vec(vec![1.0, -2.0]), vec![DMatrix::zeros(2, 2)], vec![DVector::from_vec(vec![0.3, 0.1])])
                .unwrap();
        assert_eq!(strat_to_ito(&s), s);
        assert_eq!(ito_to_strat(&s), s);
    }

    #[test]
    fn shape_errors() {
        assert!(LinearSde::new(DMatrix::zeros(2, 2), DVector::zeros(3), vec![], vec![]).is_err());
        assert!(LinearSde::new(DMatrix::zeros(2, 2), DVector::zeros(2), vec![DMatrix::zeros(2, 2)], vec![]).is_err());
    }

    #[test]
    fn geometric_brownian_motion_means_agree() {
        // Stratonovich dX = β X∘dW has E X(t) = e^{β²t/2}
        let strat = scalar(0.0, 0.6, 0.0);
        let ito = strat_to_ito(&strat);
        let x0 = DVector::from_element(1, 1.0);
        let exact = (0.5 * 0.36f64).exp();
        let heun = simulate_mean(&strat, Scheme::Heun, &x0, 1.0, 200, 20_000, 5).unwrap()[0];
        let em = simulate_mean(&ito, Scheme::EulerMaruyama, &x0, 1.0, 200, 20_000, 5).unwrap()[0];
        assert!((heun / exact - 1.0).abs() < 0.02, "{heun} vs {exact}");
        assert!((em / exact - 1.0).abs() < 0.02, "{em} vs {exact}");
        // ignoring the correction misses the drift
        let wrong = simulate_mean(&strat, Scheme::EulerMaruyama, &x0, 1.0, 200, 20_000, 5).unwrap()[0];
        assert!((wrong - 1.0).abs() < 0.02 && exact - wrong > 0.1);
    }
}
