use super::matrix::PolyMatrix;
use super::poly::MultiPoly;
use crate::error::{Error, Result};

/// Sylvester matrix of `f` and `g` with respect to `var`. Rows hold shifted
/// coefficient lists, highest degree first.
pub fn sylvester_matrix(f: &MultiPoly, g: &MultiPoly, var: &str) -> Result<PolyMatrix> {
    if f.vars() != g.vars() {
        return Err(Error::VariableMismatch {
            left: f.vars().names().join(", "),
            right: g.vars().names().join(", "),
        });
    }
    if f.is_zero() || g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let m = f.degree_in(var)? as usize;
    let n = g.degree_in(var)? as usize;
    if m == 0 && n == 0 {
        return Err(Error::Precondition(format!(
            "both polynomials are free of `{var}`"
        )));
    }
    let fc = f.coefficients(var)?;
    let gc = g.coefficients(var)?;
    let size = m + n;
    let mut s = PolyMatrix::zeros(f.vars(), size, size);
    for r in 0..n {
        for (k, c) in fc.iter().rev().enumerate() {
            s.set(r, r + k, c.clone());
        }
    }
    for r in 0..m {
        for (k, c) in gc.iter().rev().enumerate() {
            s.set(n + r, r + k, c.clone());
        }
    }
    Ok(s)
}

/// Resultant of `f` and `g` with respect to `var`: the Sylvester determinant.
/// The result keeps the ambient variable list and is free of `var`.
pub fn sylvester_resultant(f: &MultiPoly, g: &MultiPoly, var: &str) -> Result<MultiPoly> {
    sylvester_matrix(f, g, var)?.det_minor_expansion()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::Vars;

    fn setup() -> (Vars, MultiPoly, MultiPoly) {
        let v = Vars::new(&["x", "c"]).unwrap();
        let x = MultiPoly::var(&v, "x").unwrap();
        let c = MultiPoly::var(&v, "c").unwrap();
        (v, x, c)
    }

    #[test]
    fn common_root_gives_zero() {
        let (_, x, c) = setup();
        let f = &x - &c;
        assert!(sylvester_resultant(&f, &f, "x").unwrap().is_zero());
    }

    #[test]
    fn linear_pair() {
        // det [[1, 1], [1, 2]] = 1
        let (v, x, _) = setup();
        let f = &x + &MultiPoly::from_int(&v, 1);
        let g = &x + &MultiPoly::from_int(&v, 2);
        assert_eq!(sylvester_resultant(&f, &g, "x").unwrap(), MultiPoly::one(&v));
    }

    #[test]
    fn quadratic_discriminant() {
        // Res_x(x^2 + c, 2x) = 4c
        let (v, x, c) = setup();
        let f = &(&x * &x) + &c;
        let g = x.scale(&2.into());
        assert_eq!(
            sylvester_resultant(&f, &g, "x").unwrap(),
            c.scale(&4.into())
        );
        assert_eq!(sylvester_matrix(&f, &g, "x").unwrap().nrows(), 3);
        let _ = v;
    }

    #[test]
    fn degenerate_inputs() {
        let (v, x, c) = setup();
        assert!(matches!(
            sylvester_resultant(&MultiPoly::zero(&v), &x, "x"),
            Err(Error::ZeroPolynomial)
        ));
        assert!(sylvester_resultant(&c, &c, "x").is_err());
    }
}
