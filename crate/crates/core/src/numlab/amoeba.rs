use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::roots::roots_aberth;
use super::scaling::{fit_line, log_grid};
use crate::error::{Error, Result};
use crate::lindblad::{EPSILON, OMEGA};
use crate::polycore::MultiPoly;
use crate::tropgeo::Tentacle;

const ZERO_CUTOFF: f64 = 1e-14;

/// A point `(log|ε|, log|ω|)` of the amoeba.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmoebaPoint {
    pub log_eps: f64,
    pub log_mag: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmoebaCloud {
    pub points: Vec<AmoebaPoint>,
    pub modulus_range: (f64, f64),
    pub n_moduli: usize,
    pub n_phases: usize,
    /// Grid points where the root finder failed.
    pub skipped: usize,
}

/// Dense coefficients `c[i][j]` of `ω^i ε^j`.
fn dense(f: &MultiPoly) -> Result<Vec<Vec<Complex64>>> {
    if let Some(other) = f.support().into_iter().find(|v| *v != OMEGA && *v != EPSILON) {
        return Err(Error::Precondition(format!(
            "polynomial still involves `{other}`; substitute parameter values first"
        )));
    }
    let wi = f.vars().index_of(OMEGA)?;
    let ei = f.vars().index_of(EPSILON)?;
    let dw = f.degree_in(OMEGA)? as usize;
    let de = f.degree_in(EPSILON)? as usize;
    if dw == 0 || de == 0 {
        return Err(Error::Precondition(
            "amoeba sampling needs a polynomial involving both omega and epsilon".into(),
        ));
    }
    let mut c = vec![vec![Complex64::new(0.0, 0.0); de + 1]; dw + 1];
    for (e, coeff) in f.terms() {
        c[e.exps()[wi] as usize][e.exps()[ei] as usize] = coeff.to_complex();
    }
    Ok(c)
}

fn eval_row(row: &[Complex64], x: Complex64) -> Complex64 {
    row.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// Samples the amoeba of `f(ω, ε) = 0` on a log-modulus × phase grid.
///
/// For each grid value of `ε` the roots in `ω` are computed, and for each
/// grid value of `ω` the roots in `ε`; every root pair with both moduli above
/// the zero cutoff becomes a point. Sampling from both sides resolves
/// tentacles along which one coordinate stays bounded while the other
/// tends to zero. Points are emitted in grid order, so the cloud is
/// deterministic.
pub fn amoeba_sample(
    f: &MultiPoly,
    modulus_range: (f64, f64),
    n_moduli: usize,
    n_phases: usize,
) -> Result<AmoebaCloud> {
    let (lo, hi) = modulus_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n_moduli < 2 || n_phases < 1 {
        return Err(Error::InvalidArgument(
            "need 0 < min < max, at least 2 moduli and 1 phase".into(),
        ));
    }
    let c = dense(f)?;
    let transposed: Vec<Vec<Complex64>> = (0..c[0].len())
        .map(|j| c.iter().map(|row| row[j]).collect())
        .collect();
    let moduli = log_grid(lo, hi, n_moduli);
    let grid: Vec<(bool, Complex64)> = [false, true]
        .into_iter()
        .flat_map(|solve_eps| {
            moduli.iter().flat_map(move |&r| {
                (0..n_phases).map(move |k| {
                    (solve_eps, Complex64::from_polar(r, TAU * k as f64 / n_phases as f64))
                })
            })
        })
        .collect();

    let results: Vec<Option<Vec<AmoebaPoint>>> = grid
        .par_iter()
        .map(|&(solve_eps, fixed)| {
            // Coefficients of the polynomial in the free variable.
            let table = if solve_eps { &transposed } else { &c };
            let coeffs: Vec<Complex64> = table.iter().map(|row| eval_row(row, fixed)).collect();
            let roots = roots_aberth(&coeffs).ok()?;
            Some(
                roots
                    .into_iter()
                    .filter(|z| z.norm() > ZERO_CUTOFF)
                    .map(|z| {
                        let (eps, omega) = if solve_eps { (z, fixed) } else { (fixed, z) };
                        AmoebaPoint {
                            log_eps: eps.norm().ln(),
                            log_mag: omega.norm().ln(),
                        }
                    })
                    .collect(),
            )
        })
        .collect();

    let skipped = results.iter().filter(|r| r.is_none()).count();
    Ok(AmoebaCloud {
        points: results.into_iter().flatten().flatten().collect(),
        modulus_range,
        n_moduli,
        n_phases,
        skipped,
    })
}

/// Fit of one expected tentacle.
#[derive(Clone, Debug, PartialEq)]
pub struct TentacleFit {
    pub expected: Tentacle,
    /// Fitted `dlog|ε| / dlog|ω|`; `None` when unsupported or vertical.
    pub fitted_slope: Option<f64>,
    /// Distance between fitted and expected direction in slope units
    /// (for a vertical tentacle, the fitted `dlog|ω| / dlog|ε|`).
    pub deviation: Option<f64>,
    /// Points used in the fit.
    pub support: usize,
}

impl TentacleFit {
    pub fn is_supported(&self) -> bool {
        self.deviation.is_some()
    }
}

/// Assigns each point to the expected tentacle whose direction is closest in
/// angle to the point's position vector, keeps the lowest decade of the
/// coordinate that dominates the tentacle direction, and fits a line there.
pub fn fit_tentacles(cloud: &AmoebaCloud, expected: &[Tentacle]) -> Result<Vec<TentacleFit>> {
    if cloud.points.is_empty() {
        return Err(Error::Precondition("empty amoeba cloud".into()));
    }
    let (min_x, max_x) = cloud
        .points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.log_eps), b.max(p.log_eps)));
    if max_x - min_x < 2.0 * std::f64::consts::LN_10 {
        return Err(Error::Precondition("cloud spans less than two decades in |epsilon|".into()));
    }
    // Directions in (log|ω|, log|ε|), normalized.
    let dirs: Vec<(f64, f64)> = expected
        .iter()
        .map(|t| {
            let (u, v) = (t.direction.0 as f64, t.direction.1 as f64);
            let n = u.hypot(v);
            (u / n, v / n)
        })
        .collect();
    let mut members: Vec<Vec<(f64, f64)>> = vec![Vec::new(); expected.len()];
    for p in &cloud.points {
        let (u, v) = (p.log_mag, p.log_eps);
        let n = u.hypot(v);
        if n == 0.0 {
            continue;
        }
        let best = dirs
            .iter()
            .enumerate()
            .max_by(|a, b| (a.1 .0 * u + a.1 .1 * v).total_cmp(&(b.1 .0 * u + b.1 .1 * v)))
            .map(|(k, _)| k);
        if let Some(k) = best {
            members[k].push((u, v));
        }
    }

    Ok(expected
        .iter()
        .zip(&dirs)
        .zip(members)
        .map(|((tentacle, &(du, dv)), pts)| {
            // Dominant coordinate: log|ε| unless the tentacle is flatter than 45°.
            let eps_dominant = dv.abs() >= du.abs();
            let key = |p: &(f64, f64)| if eps_dominant { p.1 } else { p.0 };
            let lowest = pts.iter().map(key).fold(f64::INFINITY, f64::min);
            let region: Vec<(f64, f64)> = pts
                .iter()
                .copied()
                .filter(|p| key(p) <= lowest + std::f64::consts::LN_10)
                .collect();
            let (xs, ys): (Vec<f64>, Vec<f64>) = region
                .iter()
                .map(|&(u, v)| if eps_dominant { (v, u) } else { (u, v) })
                .unzip();
            let raw = fit_line(&xs, &ys).ok().map(|f| f.slope);
            let (fitted_slope, deviation) = match raw {
                None => (None, None),
                Some(s) if eps_dominant => {
                    // s = dlog|ω| / dlog|ε|
                    match &tentacle.slope {
                        None => (None, Some(s.abs())),
                        Some(e) => {
                            let fitted = if s == 0.0 { None } else { Some(1.0 / s) };
                            (fitted, Some(fitted.map_or(f64::INFINITY, |f| (f - e.to_f64()).abs())))
                        }
                    }
                }
                Some(s) => {
                    let dev = match &tentacle.slope {
                        None => f64::INFINITY,
                        Some(e) => (s - e.to_f64()).abs(),
                    };
                    (Some(s), Some(dev))
                }
            };
            TentacleFit {
                expected: tentacle.clone(),
                fitted_slope,
                deviation,
                support: region.len(),
            }
        })
        .collect())
}
