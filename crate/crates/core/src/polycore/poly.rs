use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use super::gauss::GaussRational;
use crate::error::{Error, Result};

/// Ordered list of variable names shared by every polynomial of one
/// computation context.
#[derive(Clone, Eq, Hash)]
pub struct Vars(Arc<Vec<String>>);

impl Vars {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (k, name) in names.iter().enumerate() {
            let valid = name
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || name == "i" {
                return Err(Error::InvalidArgument(format!(
                    "`{name}` is not a valid variable name"
                )));
            }
            if names[..k].contains(name) {
                return Err(Error::InvalidArgument(format!("duplicate variable `{name}`")));
            }
        }
        Ok(Self(Arc::new(names)))
    }

    pub fn empty() -> Self {
        Self(Arc::new(Vec::new()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.0
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.iter().any(|v| v == name)
    }

    /// New list with `extra` names appended (those already present are skipped).
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Result<Self> {
        let mut names = self.0.as_ref().clone();
        for e in extra {
            if !names.iter().any(|n| n == e.as_ref()) {
                names.push(e.as_ref().to_string());
            }
        }
        Vars::new(&names)
    }
}

impl PartialEq for Vars {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl fmt::Debug for Vars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(", "))
    }
}

/// Exponent vector ordered graded-lexicographically: total degree first,
/// then lexicographic with the first variable most significant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVec {
    degree: u32,
    exps: Vec<u32>,
}

impl ExponentVec {
    pub fn new(exps: Vec<u32>) -> Self {
        Self {
            degree: exps.iter().sum(),
            exps,
        }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::new(vec![0; nvars])
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn total_degree(&self) -> u32 {
        self.degree
    }

    fn add(&self, other: &Self) -> Self {
        Self {
            degree: self.degree + other.degree,
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    fn checked_sub(&self, other: &Self) -> Option<Self> {
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u32>>>()?;
        Some(Self::new(exps))
    }

    fn with(&self, index: usize, value: u32) -> Self {
        let mut exps = self.exps.clone();
        exps[index] = value;
        Self::new(exps)
    }
}

impl fmt::Debug for ExponentVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

/// Sparse multivariate polynomial over [`GaussRational`].
///
/// No stored coefficient is ever zero, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    vars: Vars,
    terms: BTreeMap<ExponentVec, GaussRational>,
}

impl MultiPoly {
    pub fn zero(vars: &Vars) -> Self {
        Self {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: GaussRational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(ExponentVec::zero(vars.len()), c);
        }
        p
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, GaussRational::one())
    }

    pub fn from_int(vars: &Vars, n: i64) -> Self {
        Self::constant(vars, GaussRational::from_int(n))
    }

    pub fn var(vars: &Vars, name: &str) -> Result<Self> {
        let k = vars.index_of(name)?;
        let mut exps = vec![0; vars.len()];
        exps[k] = 1;
        Ok(Self::monomial(vars, exps, GaussRational::one()))
    }

    pub fn monomial(vars: &Vars, exps: Vec<u32>, c: GaussRational) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(ExponentVec::new(exps), c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, combining
    /// repeated monomials.
    pub fn from_terms(
        vars: &Vars,
        terms: impl IntoIterator<Item = (Vec<u32>, GaussRational)>,
    ) -> Self {
        let mut p = Self::zero(vars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), vars.len(), "exponent vector length");
            p.add_term(ExponentVec::new(exps), &c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVec, &GaussRational)> {
        self.terms.iter()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.degree == 0)
    }

    pub fn as_constant(&self) -> Option<GaussRational> {
        if self.is_zero() {
            return Some(GaussRational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn constant_term(&self) -> GaussRational {
        self.terms
            .get(&ExponentVec::zero(self.vars.len()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree).max()
    }

    /// Leading term under the graded-lex order.
    pub fn leading_term(&self) -> Option<(&ExponentVec, &GaussRational)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, e: ExponentVec, c: &GaussRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VariableMismatch {
                left: self.vars.names().join(", "),
                right: other.vars.names().join(", "),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), &-c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = Self::zero(&self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal conjugate: conjugates coefficients, variables are treated as real.
    pub fn conj(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect(),
        }
    }

    pub fn degree_in(&self, var: &str) -> Result<u32> {
        let k = self.vars.index_of(var)?;
        Ok(self.terms.keys().map(|e| e.exps[k]).max().unwrap_or(0))
    }

    /// Lowest exponent of `var` over all terms (the `var`-adic valuation).
    /// `None` for the zero polynomial.
    pub fn min_degree_in(&self, var: &str) -> Result<Option<u32>> {
        let k = self.vars.index_of(var)?;
        Ok(self.terms.keys().map(|e| e.exps[k]).min())
    }

    /// True when no term involves `var`.
    pub fn is_free_of(&self, var: &str) -> Result<bool> {
        Ok(self.degree_in(var)? == 0)
    }

    /// Variables that actually occur in some term.
    pub fn support(&self) -> Vec<&str> {
        (0..self.vars.len())
            .filter(|&k| self.terms.keys().any(|e| e.exps[k] > 0))
            .map(|k| self.vars.names()[k].as_str())
            .collect()
    }

    /// Coefficients with respect to `var`, indexed by degree. Each entry keeps
    /// the ambient variable list and is free of `var`.
    pub fn coefficients(&self, var: &str) -> Result<Vec<MultiPoly>> {
        let k = self.vars.index_of(var)?;
        let deg = self.degree_in(var)? as usize;
        let mut out = vec![Self::zero(&self.vars); deg + 1];
        for (e, c) in &self.terms {
            let d = e.exps[k] as usize;
            out[d].terms.insert(e.with(k, 0), c.clone());
        }
        Ok(out)
    }

    /// Coefficient of `var^degree`.
    pub fn coefficient(&self, var: &str, degree: u32) -> Result<MultiPoly> {
        let k = self.vars.index_of(var)?;
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e.exps[k] == degree {
                out.terms.insert(e.with(k, 0), c.clone());
            }
        }
        Ok(out)
    }

    pub fn derivative(&self, var: &str) -> Result<Self> {
        let k = self.vars.index_of(var)?;
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let d = e.exps[k];
            if d > 0 {
                let factor = GaussRational::from_int(d as i64);
                out.add_term(e.with(k, d - 1), &(c * &factor));
            }
        }
        Ok(out)
    }

    /// Re-expresses the polynomial over `target`, which must contain every
    /// variable occurring in `self`.
    pub fn embed(&self, target: &Vars) -> Result<Self> {
        if &self.vars == target {
            return Ok(self.clone());
        }
        let map: Vec<Option<usize>> = self
            .vars
            .names()
            .iter()
            .map(|n| target.index_of(n).ok())
            .collect();
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut exps = vec![0; target.len()];
            for (k, &d) in e.exps.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                let t = map[k].ok_or_else(|| Error::UnknownVariable(self.vars.names()[k].clone()))?;
                exps[t] = d;
            }
            out.add_term(ExponentVec::new(exps), c);
        }
        Ok(out)
    }

    /// Exact substitution of polynomials for variables. All bound values must
    /// share one variable list, which becomes the variable list of the result;
    /// unbound variables of `self` pass through and must exist there too.
    pub fn substitute(&self, bindings: &BTreeMap<String, MultiPoly>) -> Result<Self> {
        for name in bindings.keys() {
            self.vars.index_of(name)?;
        }
        let Some(first) = bindings.values().next() else {
            return Ok(self.clone());
        };
        let target = first.vars.clone();
        for v in bindings.values() {
            if v.vars != target {
                return Err(Error::VariableMismatch {
                    left: target.names().join(", "),
                    right: v.vars.names().join(", "),
                });
            }
        }
        let images: Vec<MultiPoly> = self
            .vars
            .names()
            .iter()
            .map(|n| match bindings.get(n) {
                Some(p) => Ok(p.clone()),
                None => MultiPoly::var(&target, n),
            })
            .collect::<Result<_>>()?;
        Ok(self.compose(&target, &images))
    }

    /// `den^d · self[var := num/den]` with `d = deg_var(self)`: substitution
    /// of a rational function with the denominator cleared. Vanishes exactly
    /// when the substitution does, wherever `den ≠ 0`.
    pub fn substitute_fraction(&self, var: &str, num: &MultiPoly, den: &MultiPoly) -> Result<Self> {
        if num.vars != self.vars || den.vars != self.vars {
            return Err(Error::VariableMismatch {
                left: self.vars.names().join(", "),
                right: num.vars.names().join(", "),
            });
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.degree_in(var)?;
        let mut out = MultiPoly::zero(&self.vars);
        for (k, c) in self.coefficients(var)?.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = &(c * &num.pow(k as u32)) * &den.pow(d - k as u32);
            out = &out + &term;
        }
        Ok(out)
    }

    /// Substitutes constants for some variables, keeping the variable list.
    pub fn substitute_values(&self, values: &BTreeMap<String, GaussRational>) -> Result<Self> {
        let mut images: Vec<Option<&GaussRational>> = vec![None; self.vars.len()];
        for (name, value) in values {
            images[self.vars.index_of(name)?] = Some(value);
        }
        let mut powers: Vec<Vec<GaussRational>> = vec![vec![GaussRational::one()]; self.vars.len()];
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut coeff = c.clone();
            let mut exps = e.exps.clone();
            for (k, image) in images.iter().enumerate() {
                if let Some(value) = image {
                    let d = exps[k] as usize;
                    while powers[k].len() <= d {
                        let next = powers[k].last().unwrap() * value;
                        powers[k].push(next);
                    }
                    coeff = &coeff * &powers[k][d];
                    exps[k] = 0;
                }
            }
            out.add_term(ExponentVec::new(exps), &coeff);
        }
        Ok(out)
    }

    fn compose(&self, target: &Vars, images: &[MultiPoly]) -> Self {
        let mut powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|_| vec![MultiPoly::one(target)])
            .collect();
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(target, c.clone());
            for (k, &d) in e.exps.iter().enumerate() {
                if d == 0 {
                    continue;
                }
                while powers[k].len() <= d as usize {
                    let next = powers[k].last().unwrap() * &images[k];
                    powers[k].push(next);
                }
                term = &term * &powers[k][d as usize];
            }
            for (te, tc) in term.terms {
                out.add_term(te, &tc);
            }
        }
        out
    }

    /// Exact quotient `self / divisor`; fails if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self> {
        self.check_vars(divisor)?;
        let (lead_e, lead_c) = divisor.leading_term().ok_or(Error::DivisionByZero)?;
        let lead_inv = lead_c.inv()?;
        if divisor.terms.len() == 1 {
            let mut out = Self::zero(&self.vars);
            for (e, c) in &self.terms {
                let q = e.checked_sub(lead_e).ok_or(Error::InexactDivision)?;
                out.terms.insert(q, c * &lead_inv);
            }
            return Ok(out);
        }
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.vars);
        while let Some((e, c)) = rem.leading_term() {
            let qe = e.checked_sub(lead_e).ok_or(Error::InexactDivision)?;
            let qc = c * &lead_inv;
            for (de, dc) in &divisor.terms {
                rem.add_term(qe.add(de), &-(&qc * dc));
            }
            quot.add_term(qe, &qc);
        }
        Ok(quot)
    }

    /// Floating-point evaluation at a point given in variable-list order.
    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.vars.len(), "evaluation point length");
        self.terms
            .iter()
            .map(|(e, c)| {
                e.exps
                    .iter()
                    .zip(point)
                    .fold(c.to_complex(), |acc, (&d, x)| acc * x.powu(d))
            })
            .sum()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::exprparse::format_poly(self))
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({} | {:?})", self, self.vars)
    }
}

// Operator forms panic on variable-list mismatch; the `checked_*` methods
// report it instead.
impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_add(rhs).expect("polynomial addition")
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_sub(rhs).expect("polynomial subtraction")
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs).expect("polynomial multiplication")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::Rational;

    fn vars(names: &[&str]) -> Vars {
        Vars::new(names).unwrap()
    }

    fn q(n: i64, d: i64) -> GaussRational {
        GaussRational::real(Rational::new(n, d).unwrap())
    }

    #[test]
    fn addition_cancels() {
        let v = vars(&["x"]);
        let x = MultiPoly::var(&v, "x").unwrap();
        let one = MultiPoly::one(&v);
        let s = (&x + &one).checked_add(&(&x - &one)).unwrap();
        assert_eq!(s, x.scale(&GaussRational::from_int(2)));
        assert_eq!(&s + &MultiPoly::zero(&v), s);

        let v = vars(&["omega", "epsilon"]);
        let w = MultiPoly::var(&v, "omega").unwrap();
        let e = MultiPoly::var(&v, "epsilon").unwrap();
        let lhs = &(&w * &w) + &(&e * &w);
        assert_eq!(&lhs + &-(&e * &w), &w * &w);
    }

    #[test]
    fn mismatched_variables_are_rejected() {
        let a = MultiPoly::var(&vars(&["x"]), "x").unwrap();
        let b = MultiPoly::var(&vars(&["y"]), "y").unwrap();
        assert!(matches!(a.checked_add(&b), Err(Error::VariableMismatch { .. })));
        assert!(a.checked_mul(&b).is_err());
    }

    #[test]
    fn conjugate_pair_product() {
        let v = vars(&["x"]);
        let x = MultiPoly::var(&v, "x").unwrap();
        let i = MultiPoly::constant(&v, GaussRational::i());
        let p = &(&x + &i) * &(&x - &i);
        assert_eq!(p, &(&x * &x) + &MultiPoly::one(&v));
        assert_eq!(&p * &MultiPoly::one(&v), p);
    }

    #[test]
    fn binomial_expansion() {
        // (w + 1/2)^4 = w^4 + 2w^3 + 3/2 w^2 + 1/2 w + 1/16, coefficients
        // from C(4,k) (1/2)^(4-k).
        let v = vars(&["omega"]);
        let w = MultiPoly::var(&v, "omega").unwrap();
        let p = (&w + &MultiPoly::constant(&v, q(1, 2))).pow(4);
        let binom = [1i64, 4, 6, 4, 1];
        let expected = MultiPoly::from_terms(
            &v,
            (0..=4u32).map(|k| (vec![k], q(binom[k as usize], 1i64 << (4 - k)))),
        );
        assert_eq!(p, expected);
        assert_eq!(
            p.coefficients("omega").unwrap()[2].as_constant().unwrap(),
            q(3, 2)
        );
    }

    #[test]
    fn coefficients_by_degree() {
        let v = vars(&["omega", "epsilon"]);
        let w = MultiPoly::var(&v, "omega").unwrap();
        let e = MultiPoly::var(&v, "epsilon").unwrap();
        let p = &(&(&w * &w) + &(&e * &w)) + &(&e * &e);
        let c = p.coefficients("omega").unwrap();
        assert_eq!(c, vec![&e * &e, e.clone(), MultiPoly::one(&v)]);
        let c = e.pow(3).coefficients("omega").unwrap();
        assert_eq!(c, vec![e.pow(3)]);
    }

    #[test]
    fn derivatives() {
        let v = vars(&["omega", "epsilon"]);
        let w = MultiPoly::var(&v, "omega").unwrap();
        let e = MultiPoly::var(&v, "epsilon").unwrap();
        assert_eq!(
            w.pow(3).derivative("omega").unwrap(),
            (&w * &w).scale(&GaussRational::from_int(3))
        );
        let p = &(&e * &e) * &w;
        assert_eq!(
            p.derivative("epsilon").unwrap(),
            (&e * &w).scale(&GaussRational::from_int(2))
        );
        assert!(w.derivative("zeta").is_err());
    }

    #[test]
    fn substitution() {
        let v = vars(&["gamma_x", "gamma_y", "Omega"]);
        let gx = MultiPoly::var(&v, "gamma_x").unwrap();
        let gy = MultiPoly::var(&v, "gamma_y").unwrap();
        let om = MultiPoly::var(&v, "Omega").unwrap();
        let p = &(&gx - &gy) + &om;
        let mut b = BTreeMap::new();
        b.insert("gamma_x".to_string(), &gy - &om);
        assert!(p.substitute(&b).unwrap().is_zero());

        let vx = vars(&["x"]);
        let x = MultiPoly::var(&vx, "x").unwrap();
        let mut b = BTreeMap::new();
        b.insert("x".to_string(), MultiPoly::from_int(&vx, 3));
        assert_eq!(
            (&x * &x).substitute(&b).unwrap(),
            MultiPoly::from_int(&vx, 9)
        );
        let mut bad = BTreeMap::new();
        bad.insert("y".to_string(), MultiPoly::from_int(&vx, 3));
        assert!(matches!(x.substitute(&bad), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn fraction_substitution_clears_denominator() {
        let v = vars(&["x", "a"]);
        let x = MultiPoly::var(&v, "x").unwrap();
        let a = MultiPoly::var(&v, "a").unwrap();
        let two = MultiPoly::from_int(&v, 2);
        // (2x - a)(x + 1) at x = a/2
        let p = &(&(&two * &x) - &a) * &(&x + &MultiPoly::one(&v));
        assert!(p.substitute_fraction("x", &a, &two).unwrap().is_zero());
        // x^2 + 1 at x = a/2 → a^2 + 4
        let p = &(&x * &x) + &MultiPoly::one(&v);
        let four = MultiPoly::from_int(&v, 4);
        assert_eq!(p.substitute_fraction("x", &a, &two).unwrap(), &(&a * &a) + &four);
        assert!(p.substitute_fraction("x", &a, &MultiPoly::zero(&v)).is_err());
    }

    #[test]
    fn exact_division() {
        let v = vars(&["x", "y"]);
        let x = MultiPoly::var(&v, "x").unwrap();
        let y = MultiPoly::var(&v, "y").unwrap();
        let a = &(&x + &y) * &(&(&x * &y) - &MultiPoly::from_int(&v, 3));
        assert_eq!(a.exact_div(&(&x + &y)).unwrap(), &(&x * &y) - &MultiPoly::from_int(&v, 3));
        assert!(matches!(
            (&a + &MultiPoly::one(&v)).exact_div(&(&x + &y)),
            Err(Error::InexactDivision)
        ));
        assert!(a.exact_div(&MultiPoly::zero(&v)).is_err());
    }

    #[test]
    fn reserved_and_duplicate_names() {
        assert!(Vars::new(&["i"]).is_err());
        assert!(Vars::new(&["x", "x"]).is_err());
        assert!(Vars::new(&["2x"]).is_err());
    }
}
