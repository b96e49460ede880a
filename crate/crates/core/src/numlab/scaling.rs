use num_complex::Complex64;
use rayon::prelude::*;

use super::eigen::eigenvalues;
use super::CMatrix;
use crate::error::{Error, Result};

/// Which eigenvalue of the degenerate cluster to follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Largest displacement from the degenerate eigenvalue at the smallest ε.
    Largest,
    /// Smallest nonzero displacement.
    Smallest,
    /// Cluster member by rank of displacement, ascending.
    Index(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub rsquared: f64,
    pub npoints: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingSample {
    pub epsilon: f64,
    pub value: Complex64,
    pub log_eps: f64,
    pub log_mag: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingResult {
    pub samples: Vec<ScalingSample>,
    pub fit: ScalingFit,
    /// Number of eigenvalues of the unperturbed matrix at the degenerate value.
    pub cluster_size: usize,
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<ScalingFit> {
    let n = x.len();
    if n < 3 || y.len() != n {
        return Err(Error::Numerical(format!("line fit needs at least 3 points, got {n}")));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Numerical("line fit with no spread in x".into()));
    }
    let slope = sxy / sxx;
    let rsquared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(ScalingFit {
        slope,
        intercept: my - slope * mx,
        rsquared,
        npoints: n,
    })
}

/// Tracks one eigenvalue of `L0 + ε·L1` across `eps_grid` and fits
/// `log|ω − ω0|` against `log ε`.
pub fn scaling_sweep(
    l0: &CMatrix,
    l1: &CMatrix,
    omega0: Complex64,
    eps_grid: &[f64],
    branch: Branch,
) -> Result<ScalingResult> {
    if l0.n != l1.n {
        return Err(Error::DimensionMismatch("L0 and L1 differ in size".into()));
    }
    if eps_grid.len() < 3 {
        return Err(Error::InvalidArgument("need at least 3 epsilon values".into()));
    }
    if eps_grid.iter().any(|e| !(e.is_finite() && *e > 0.0)) || eps_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "epsilon values must be positive and strictly increasing".into(),
        ));
    }
    let tol = 1e-4 * (1.0 + omega0.norm());
    let base = eigenvalues(l0)?;
    let cluster_size = base.iter().filter(|z| (*z - omega0).norm() <= tol).count();
    if cluster_size == 0 {
        return Err(Error::Precondition(format!(
            "no eigenvalue of the unperturbed matrix within {tol:.1e} of {omega0}"
        )));
    }

    let spectra: Vec<Vec<Complex64>> = eps_grid
        .par_iter()
        .map(|&eps| eigenvalues(&l0.add_scaled(l1, Complex64::new(eps, 0.0))))
        .collect::<Result<_>>()?;

    // The cluster members at the smallest ε are the eigenvalues closest to ω0.
    let mut first: Vec<Complex64> = spectra[0].clone();
    first.sort_by(|a, b| (a - omega0).norm().total_cmp(&(b - omega0).norm()));
    let members = &first[..cluster_size];
    let start = match branch {
        Branch::Largest => *members.last().unwrap(),
        Branch::Smallest => *members
            .iter()
            .find(|z| (*z - omega0).norm() > 0.0)
            .ok_or_else(|| Error::Numerical("every cluster member is invariant".into()))?,
        Branch::Index(k) => *members.get(k).ok_or_else(|| {
            Error::InvalidArgument(format!("branch index {k} exceeds cluster size {cluster_size}"))
        })?,
    };

    let mut current = start;
    let mut samples = Vec::with_capacity(eps_grid.len());
    for (k, (&eps, spectrum)) in eps_grid.iter().zip(&spectra).enumerate() {
        if k > 0 {
            current = *spectrum
                .iter()
                .min_by(|a, b| (*a - current).norm().total_cmp(&(*b - current).norm()))
                .unwrap();
        }
        let mag = (current - omega0).norm();
        samples.push(ScalingSample {
            epsilon: eps,
            value: current,
            log_eps: eps.ln(),
            log_mag: mag.ln(),
        });
    }
    if samples.iter().any(|s| !s.log_mag.is_finite()) {
        return Err(Error::Numerical(
            "tracked eigenvalue does not move away from the degenerate value".into(),
        ));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.log_eps).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.log_mag).collect();
    let fit = fit_line(&xs, &ys)?;
    Ok(ScalingResult {
        samples,
        fit,
        cluster_size,
    })
}
