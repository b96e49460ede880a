use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 200;
const ACCEPT: f64 = 1e-10;

/// `Σ |a_k| |z|^k`, the natural scale for judging `|p(z)|`.
fn abs_scale(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Value and first derivative.
fn horner2(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    coeffs.iter().rev().fold((zero, zero), |(p, dp), c| (p * z + c, dp * z + p))
}

fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// Relative residual `|p(z)| / Σ|a_k||z|^k`.
pub fn relative_residual(coeffs: &[Complex64], z: Complex64) -> f64 {
    let s = abs_scale(coeffs, z);
    if s == 0.0 {
        0.0
    } else {
        horner(coeffs, z).norm() / s
    }
}

/// Taylor coefficients of `p(x + c)` in `x`, ascending.
fn taylor_shift(coeffs: &[Complex64], c: Complex64) -> Vec<Complex64> {
    let mut a = coeffs.to_vec();
    let n = a.len();
    for k in 0..n {
        for j in (k..n - 1).rev() {
            let t = a[j + 1] * c;
            a[j] += t;
        }
    }
    a
}

/// All complex roots of `Σ coeffs[k]·z^k` (coefficients in ascending
/// degree) by Aberth–Ehrlich simultaneous iteration.
///
/// Exact zero roots are deflated first and returned as exact zeros. Roots
/// that the iteration leaves as a tight cluster around a multiple root are
/// collapsed onto a single refined value, so a numerically multiple root is
/// reported as identical copies.
pub fn roots_aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite polynomial coefficient".into()));
    }
    let Some(deg) = coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)) else {
        return Err(Error::ZeroPolynomial);
    };
    if deg == 0 {
        return Err(Error::InvalidArgument("polynomial has degree 0".into()));
    }
    let zeros = coeffs.iter().position(|c| *c != Complex64::new(0.0, 0.0)).unwrap();
    let lead = coeffs[deg];
    let p: Vec<Complex64> = coeffs[zeros..=deg].iter().map(|c| c / lead).collect();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let n = p.len() - 1;
    if n == 0 {
        return Ok(roots);
    }
    if n == 1 {
        roots.push(-p[0]);
        return Ok(roots);
    }

    // Start on a circle around the centroid, sized from the shifted
    // polynomial so clustered roots get appropriately small initial guesses.
    let centroid = -p[n - 1] / n as f64;
    let shifted = taylor_shift(&p, centroid);
    let radius = (0..n)
        .map(|k| shifted[k].norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE.sqrt());
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| centroid + Complex64::from_polar(radius, TAU * k as f64 / n as f64 + 0.4))
        .collect();

    let mut done = vec![false; n];
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && done.iter().any(|d| !d) {
        sweeps += 1;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (val, der) = horner2(&p, z[k]);
            if val.norm() <= 4.0 * f64::EPSILON * abs_scale(&p, z[k]) {
                done[k] = true;
                continue;
            }
            let ratio = val / der;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[k] -= step;
            if step.norm() <= f64::EPSILON * z[k].norm().max(f64::MIN_POSITIVE) {
                done[k] = true;
            }
        }
    }

    collapse_clusters(&p, &mut z);

    let worst = z
        .iter()
        .map(|&r| relative_residual(&p, r))
        .fold(0.0, f64::max);
    if worst > ACCEPT || z.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(Error::NonConvergence {
            sweeps,
            residual: worst,
            best: z.iter().map(|r| (r.re, r.im)).collect(),
        });
    }
    roots.extend(z);
    Ok(roots)
}

/// Groups roots closer than `tol` (single linkage).
fn clusters(z: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = z.len();
    let mut label: Vec<usize> = (0..n).collect();
    for a in 0..n {
        for b in a + 1..n {
            if (z[a] - z[b]).norm() <= tol * (1.0 + z[a].norm()) {
                let (la, lb) = (label[a], label[b]);
                if la != lb {
                    for l in label.iter_mut() {
                        if *l == lb {
                            *l = la;
                        }
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match groups.iter_mut().find(|g| label[g[0]] == label[k]) {
            Some(g) => g.push(k),
            None => groups.push(vec![k]),
        }
    }
    groups
}

/// Replaces clusters around a multiple root by identical copies of a
/// refined center. A cluster of size `m` around a root of multiplicity `m`
/// is a simple root of `p^(m-1)`, found by Newton from the centroid, and is
/// accepted only if `p, p', …, p^(m-1)` all vanish there to rounding
/// precision. Without the derivative checks a simple root lying close to a
/// genuine multiple root would be swallowed by it.
fn collapse_clusters(p: &[Complex64], z: &mut [Complex64]) {
    for tol in [1e-6, 1e-5, 1e-4, 1e-3] {
        for group in clusters(z, tol) {
            let m = group.len();
            if m < 2 || group.iter().all(|&k| z[k] == z[group[0]]) {
                continue;
            }
            let mut derivs = vec![p.to_vec()];
            for _ in 0..m - 1 {
                let next = derivative(derivs.last().unwrap());
                derivs.push(next);
            }
            let d = derivs.pop().unwrap();
            let mut c = group.iter().map(|&k| z[k]).sum::<Complex64>() / m as f64;
            for _ in 0..50 {
                let (val, der) = horner2(&d, c);
                if der.norm() == 0.0 {
                    break;
                }
                let step = val / der;
                c -= step;
                if step.norm() <= f64::EPSILON * (1.0 + c.norm()) {
                    break;
                }
            }
            if derivs.iter().all(|q| horner(q, c).norm() <= 1e-10 * abs_scale(q, c)) {
                for &k in &group {
                    z[k] = c;
                }
            }
        }
    }
}
