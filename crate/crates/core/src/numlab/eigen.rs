use num_complex::Complex64;

use super::roots::roots_aberth;
use super::CMatrix;
use crate::error::{Error, Result};

const MAX_DIM: usize = 32;

/// Characteristic polynomial `det(λI − A)` in ascending coefficients, by the
/// Faddeev–LeVerrier recursion.
pub fn char_poly_coeffs(a: &CMatrix) -> Vec<Complex64> {
    let n = a.n;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex64::new(1.0, 0.0);
    let mut m = CMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1}·I
        let mut next = a.matmul(&m);
        for d in 0..n {
            next.data[d * n + d] += coeffs[n - k + 1];
        }
        let am = a.matmul(&next);
        coeffs[n - k] = -am.trace() / k as f64;
        m = next;
    }
    coeffs
}

/// Eigenvalues as roots of the characteristic polynomial.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    if a.n == 0 || a.n > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "eigenvalues support dimensions 1..={MAX_DIM}, got {}",
            a.n
        )));
    }
    if a.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite matrix entry".into()));
    }
    roots_aberth(&char_poly_coeffs(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(n: usize, v: &[f64]) -> CMatrix {
        CMatrix::new(n, v.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn diagonal() {
        let mut ev = eigenvalues(&real(3, &[1., 0., 0., 0., 2., 0., 0., 0., 3.])).unwrap();
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (k, z) in ev.iter().enumerate() {
            assert!((z - Complex64::new(k as f64 + 1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn char_poly_of_two_by_two() {
        // [[1,2],[3,4]]: λ² − 5λ − 2
        let c = char_poly_coeffs(&real(2, &[1., 2., 3., 4.]));
        assert!((c[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((c[1] - Complex64::new(-5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn jordan_block_collapses() {
        let ev = eigenvalues(&real(3, &[2., 1., 0., 0., 2., 1., 0., 0., 2.])).unwrap();
        for z in ev {
            assert!((z - Complex64::new(2.0, 0.0)).norm() < 1e-6);
        }
    }
}
