//! Floating-point experiments: root finding, eigenvalues, perturbation
//! scaling fits, encircling permutations and amoeba sampling.

mod amoeba;
mod eigen;
mod encircle;
mod roots;
mod scaling;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polycore::PolyMatrix;

pub use amoeba::{amoeba_sample, fit_tentacles, AmoebaCloud, AmoebaPoint, TentacleFit};
pub use eigen::{char_poly_coeffs, eigenvalues};
pub use encircle::{encircle, EncircleResult, PermutationReport, TracePoint};
pub use roots::{relative_residual, roots_aberth};
pub use scaling::{fit_line, log_grid, scaling_sweep, Branch, ScalingFit, ScalingResult, ScalingSample};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {n}x{n} matrix",
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Converts a matrix whose entries are all constants.
    pub fn from_poly_matrix(m: &PolyMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let consts = m.to_constants().ok_or_else(|| {
            let mut free: Vec<String> = m
                .entries()
                .iter()
                .flat_map(|p| p.support().into_iter().map(String::from))
                .collect();
            free.sort();
            free.dedup();
            Error::UnboundParameters(free)
        })?;
        Ok(Self {
            n: m.nrows(),
            data: consts.iter().map(|c| c.to_complex()).collect(),
        })
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.n + c]
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|k| self.data[k * self.n + k]).sum()
    }

    /// `self + s·other`
    pub fn add_scaled(&self, other: &Self, s: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect(),
        }
    }
}
