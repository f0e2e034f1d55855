//! Small estimators shared by the verifiers.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use csl_heat::rng::stream_rng;

/// Sample mean and standard error of the mean.
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Least-squares slope of y = a·t.
pub fn slope_through_origin(t: &[f64], y: &[f64]) -> f64 {
    let tt: f64 = t.iter().map(|x| x * x).sum();
    let ty: f64 = t.iter().zip(y).map(|(a, b)| a * b).sum();
    ty / tt
}

/// Least-squares (a, b) of y = a·t + b·t².
pub fn quadratic_through_origin(t: &[f64], y: &[f64]) -> (f64, f64) {
    let (mut s2, mut s3, mut s4, mut y1, mut y2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&ti, &yi) in t.iter().zip(y) {
        s2 += ti * ti;
        s3 += ti * ti * ti;
        s4 += ti.powi(4);
        y1 += ti * yi;
        y2 += ti * ti * yi;
    }
    let det = s2 * s4 - s3 * s3;
    ((y1 * s4 - y2 * s3) / det, (s2 * y2 - s3 * y1) / det)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ChiSquareLine {
    /// Generalised least-squares slope.
    pub slope: f64,
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// χ² test of `means` against the line a·t, using the covariance of the
/// means estimated from the per-sample rows of `samples` (n × K).
///
/// Returns `None` when the covariance is singular or under-sampled.
pub fn chi_square_line(t: &[f64], samples: &[Vec<f64>]) -> Option<ChiSquareLine> {
    let k = t.len();
    let n = samples.len();
    if k < 2 || n <= k + 1 {
        return None;
    }
    let mut mean = DVector::zeros(k);
    for row in samples {
        mean += DVector::from_column_slice(row);
    }
    mean /= n as f64;
    let mut cov = DMatrix::zeros(k, k);
    for row in samples {
        let d = DVector::from_column_slice(row) - &mean;
        cov += &d * d.transpose();
    }
    cov /= ((n - 1) * n) as f64;
    let chol = cov.cholesky()?;
    let tv = DVector::from_column_slice(t);
    let ci_t = chol.solve(&tv);
    let ci_m = chol.solve(&mean);
    let slope = tv.dot(&ci_m) / tv.dot(&ci_t);
    let r = &mean - &tv * slope;
    let chi2 = r.dot(&chol.solve(&r));
    let dof = k - 1;
    let p_value = ChiSquared::new(dof as f64).ok()?.sf(chi2);
    Some(ChiSquareLine { slope, chi2, dof, p_value })
}

/// Standard deviation of `statistic` over `resamples` bootstrap draws of
/// `n` indices with replacement.
pub fn bootstrap_stderr(n: usize, resamples: usize, seed: u64, statistic: impl Fn(&[usize]) -> f64) -> f64 {
    let mut rng = stream_rng(seed, u64::MAX);
    let mut idx = vec![0usize; n];
    let values: Vec<f64> = (0..resamples)
        .map(|_| {
            for v in idx.iter_mut() {
                *v = rng.random_range(0..n);
            }
            statistic(&idx)
        })
        .collect();
    let (_, se) = mean_and_stderr(&values);
    se * (resamples as f64).sqrt()
}
