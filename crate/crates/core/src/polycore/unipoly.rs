use num_complex::Complex64;

use super::gauss::GaussRational;
use super::poly::{MultiPoly, Vars};
use crate::error::{Error, Result};

/// Dense univariate polynomial over [`GaussRational`], coefficients in
/// ascending degree with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<GaussRational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<GaussRational>) -> Self {
        while coeffs.last().is_some_and(GaussRational::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::new(vec![GaussRational::one()])
    }

    /// Reads `p` as a polynomial in `var`; every other variable must be absent.
    pub fn from_multi(p: &MultiPoly, var: &str) -> Result<Self> {
        let k = p.vars().index_of(var)?;
        if let Some(other) = p.support().into_iter().find(|v| *v != var) {
            return Err(Error::Precondition(format!(
                "polynomial is not univariate in `{var}`: it involves `{other}`"
            )));
        }
        let deg = p.degree_in(var)? as usize;
        let mut coeffs = vec![GaussRational::zero(); deg + 1];
        for (e, c) in p.terms() {
            coeffs[e.exps()[k] as usize] = c.clone();
        }
        Ok(Self::new(coeffs))
    }

    pub fn to_multi(&self, vars: &Vars, var: &str) -> Result<MultiPoly> {
        let k = vars.index_of(var)?;
        Ok(MultiPoly::from_terms(
            vars,
            self.coeffs.iter().enumerate().map(|(d, c)| {
                let mut exps = vec![0; vars.len()];
                exps[k] = d as u32;
                (exps, c.clone())
            }),
        ))
    }

    pub fn coeffs(&self) -> &[GaussRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&GaussRational> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => {
                let inv = lc.inv().expect("nonzero leading coefficient");
                Self::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(d, c)| c * &GaussRational::from_int(d as i64))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![GaussRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Self::new(out)
    }

    /// Euclidean division: `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let inv = divisor.leading().unwrap().inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![GaussRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &(&c * d);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r.monic();
        }
        Ok(a.monic())
    }

    /// Product of the distinct irreducible factors: `p / gcd(p, p')`, monic.
    pub fn squarefree_part(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.degree() == Some(0) {
            return Ok(Self::one());
        }
        let g = self.gcd(&self.derivative())?;
        Ok(self.div_rem(&g)?.0.monic())
    }

    pub fn eval(&self, x: &GaussRational) -> GaussRational {
        self.coeffs
            .iter()
            .rev()
            .fold(GaussRational::zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(GaussRational::to_complex).collect()
    }
}

/// Monic gcd of two polynomials that are univariate in `var`, returned over
/// the ambient variable list of `f`.
pub fn univariate_gcd(f: &MultiPoly, g: &MultiPoly, var: &str) -> Result<MultiPoly> {
    if f.vars() != g.vars() {
        return Err(Error::VariableMismatch {
            left: f.vars().names().join(", "),
            right: g.vars().names().join(", "),
        });
    }
    let gcd = UniPoly::from_multi(f, var)?.gcd(&UniPoly::from_multi(g, var)?)?;
    gcd.to_multi(f.vars(), var)
}
