use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::eigen::eigenvalues;
use super::CMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PermutationReport {
    /// `permutation[i]` is where the eigenvalue starting at index `i` ends.
    pub permutation: Vec<usize>,
    /// Cycle lengths, descending.
    pub cycles: Vec<usize>,
    /// Largest step-to-step matching distance.
    pub tracking_residual: f64,
    /// Smallest gap between distinct eigenvalues along the path.
    pub min_gap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub index: usize,
    pub value: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncircleResult {
    pub report: PermutationReport,
    pub traces: Vec<TracePoint>,
}

fn same(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-10 * (1.0 + a.norm())
}

/// Greedy nearest-neighbour matching of `prev` onto `next`. Candidate pairs
/// are taken by increasing distance, preferring unchanged indices on ties.
/// Identical values in `next` are interchangeable; two distinct candidates
/// at the same distance make the matching ambiguous.
fn match_step(prev: &[Complex64], next: &[Complex64]) -> Result<(Vec<usize>, f64)> {
    let n = prev.len();
    let mut pairs: Vec<(f64, bool, usize, usize)> = Vec::with_capacity(n * n);
    for (i, p) in prev.iter().enumerate() {
        for (j, q) in next.iter().enumerate() {
            pairs.push(((p - q).norm(), i != j, i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)).then(a.3.cmp(&b.3)));
    let mut assigned = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    let mut residual: f64 = 0.0;
    let scale = 1.0 + prev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for &(d, _, i, j) in &pairs {
        if assigned[i] != usize::MAX || taken[j] {
            continue;
        }
        let rival = pairs.iter().find(|&&(d2, _, i2, j2)| {
            i2 == i && j2 != j && !taken[j2] && !same(next[j], next[j2]) && (d2 - d).abs() <= 1e-9 * scale
        });
        if rival.is_some() {
            return Err(Error::Numerical(
                "ambiguous eigenvalue matching; increase the number of steps".into(),
            ));
        }
        assigned[i] = j;
        taken[j] = true;
        residual = residual.max(d);
    }
    Ok((assigned, residual))
}

fn min_gap(values: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for a in 0..values.len() {
        for b in a + 1..values.len() {
            if !same(values[a], values[b]) {
                gap = gap.min((values[a] - values[b]).norm());
            }
        }
    }
    gap
}

fn cycle_lengths(perm: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Follows the eigenvalues of `L0 + radius·e^{it}·L1` for `t` from 0 to
/// `2π·loops` in `steps` increments per loop and reports how they are
/// permuted.
pub fn encircle(l0: &CMatrix, l1: &CMatrix, radius: f64, steps: usize, loops: usize) -> Result<EncircleResult> {
    if l0.n != l1.n {
        return Err(Error::DimensionMismatch("L0 and L1 differ in size".into()));
    }
    if steps < 100 {
        return Err(Error::InvalidArgument(format!("steps must be at least 100, got {steps}")));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    if loops == 0 {
        return Err(Error::InvalidArgument("loops must be at least 1".into()));
    }
    let total = steps * loops;
    let spectra: Vec<Vec<Complex64>> = (0..=total)
        .into_par_iter()
        .map(|k| {
            let t = TAU * k as f64 / steps as f64;
            eigenvalues(&l0.add_scaled(l1, Complex64::from_polar(radius, t)))
        })
        .collect::<Result<_>>()?;

    let n = l0.n;
    // position[label] = index into the current spectrum
    let mut position: Vec<usize> = (0..n).collect();
    let mut residual: f64 = 0.0;
    let mut gap = min_gap(&spectra[0]);
    let mut traces = Vec::with_capacity((total + 1) * n);
    for (label, z) in spectra[0].iter().enumerate() {
        traces.push(TracePoint { t: 0.0, index: label, value: *z });
    }
    for k in 1..=total {
        let prev: Vec<Complex64> = position.iter().map(|&p| spectra[k - 1][p]).collect();
        let (assign, d) = match_step(&prev, &spectra[k])?;
        residual = residual.max(d);
        gap = gap.min(min_gap(&spectra[k]));
        position = assign;
        let t = TAU * k as f64 / steps as f64;
        for (label, &p) in position.iter().enumerate() {
            traces.push(TracePoint { t, index: label, value: spectra[k][p] });
        }
    }
    if gap.is_finite() && residual >= gap / 2.0 {
        return Err(Error::Numerical(format!(
            "tracking residual {residual:.3e} is not below half the eigenvalue gap {gap:.3e}; increase the number of steps"
        )));
    }
    // Identify final positions with the starting spectrum.
    let end: Vec<Complex64> = position.iter().map(|&p| spectra[total][p]).collect();
    let (permutation, _) = match_step(&end, &spectra[0])?;
    let cycles = cycle_lengths(&permutation);
    Ok(EncircleResult {
        report: PermutationReport {
            permutation,
            cycles,
            tracking_residual: residual,
            min_gap: gap,
        },
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn companion(n: usize) -> (CMatrix, CMatrix) {
        let mut l0 = CMatrix::zeros(n);
        for k in 0..n - 1 {
            l0.data[k * n + k + 1] = Complex64::new(1.0, 0.0);
        }
        let mut l1 = CMatrix::zeros(n);
        l1.data[(n - 1) * n] = Complex64::new(1.0, 0.0);
        (l0, l1)
    }

    #[test]
    fn cube_root_cycle() {
        let (l0, l1) = companion(3);
        let r = encircle(&l0, &l1, 0.01, 400, 1).unwrap();
        assert_eq!(r.report.cycles, [3]);
        assert!(r.report.tracking_residual < r.report.min_gap / 2.0);
        assert_eq!(r.traces.len(), 401 * 3);
    }

    #[test]
    fn no_degeneracy_means_identity() {
        let mut l0 = CMatrix::zeros(2);
        l0.data[0] = Complex64::new(1.0, 0.0);
        l0.data[3] = Complex64::new(-1.0, 0.0);
        let (_, l1) = companion(2);
        let r = encircle(&l0, &l1, 0.01, 100, 1).unwrap();
        assert_eq!(r.report.cycles, [1, 1]);
    }

    #[test]
    fn rejects_too_few_steps() {
        let (l0, l1) = companion(2);
        assert!(encircle(&l0, &l1, 0.01, 10, 1).is_err());
        assert!(encircle(&l0, &l1, 0.0, 100, 1).is_err());
    }

    #[test]
    fn cycles() {
        assert_eq!(cycle_lengths(&[1, 0, 2, 4, 5, 3]), [3, 2, 1]);
    }
}
