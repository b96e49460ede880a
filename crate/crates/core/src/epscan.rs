//! Scanning parameter space for degenerate eigenvalues by eliminating the
//! eigenvalue from the lowest characteristic-polynomial coefficients, and
//! telling exceptional points from diabolic ones.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::analysis::{Experiment, Perturbation};
use crate::error::{Error, Result};
use crate::lindblad::{build_liouvillian, char_poly, spectral_vars, ModelSpec, EPSILON, OMEGA, SHIFT};
use crate::numlab::{relative_residual, roots_aberth};
use crate::polycore::{rank, sylvester_resultant, GaussRational, MultiPoly, PolyMatrix, Rational, UniPoly};
use crate::tropgeo::{ep_orders, NewtonPolygon, Valuation};

/// Largest denominator tried when rationalizing a numeric root.
const MAX_DENOMINATOR: u64 = 1_000_000;
const DEDUP: f64 = 1e-9;
const VERIFY: f64 = 1e-8;

/// The `k` lowest `omega` coefficients of a shifted characteristic
/// polynomial. They vanish together exactly when `omega0` is an eigenvalue
/// of multiplicity at least `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegeneracyConditions {
    pub conditions: Vec<MultiPoly>,
    pub order: usize,
}

pub fn degeneracy_conditions(charpoly: &MultiPoly, k: usize) -> Result<DegeneracyConditions> {
    if charpoly.vars().contains(EPSILON) && !charpoly.is_free_of(EPSILON)? {
        return Err(Error::InvalidArgument(
            "degeneracy conditions need the unperturbed characteristic polynomial".into(),
        ));
    }
    let deg = charpoly.degree_in(OMEGA)? as usize;
    if k < 2 || k > deg {
        return Err(Error::InvalidArgument(format!(
            "order must lie in 2..={deg}, got {k}"
        )));
    }
    let conditions = (0..k)
        .map(|d| charpoly.coefficient(OMEGA, d as u32))
        .collect::<Result<_>>()?;
    Ok(DegeneracyConditions { conditions, order: k })
}

/// `Res_omega0(c1, c0)`: vanishes exactly where some `omega0` is a double
/// eigenvalue.
pub fn eliminate_shift(conds: &DegeneracyConditions) -> Result<MultiPoly> {
    if conds.order != 2 {
        return Err(Error::InvalidArgument(format!(
            "elimination uses second-order conditions, got order {}",
            conds.order
        )));
    }
    let (c0, c1) = (&conds.conditions[0], &conds.conditions[1]);
    for c in [c0, c1] {
        if !c.vars().contains(SHIFT) || c.is_free_of(SHIFT)? {
            return Err(Error::Precondition(
                "a condition does not involve omega0; solve the conditions directly".into(),
            ));
        }
    }
    sylvester_resultant(c1, c0, SHIFT)
}

/// Symbolic `det(L − (ω + ω0)·I)` of a model over the spectral variables.
pub fn symbolic_char_poly(spec: &ModelSpec) -> Result<MultiPoly> {
    let vars = spectral_vars(&spec.params)?;
    let l = build_liouvillian(spec)?.matrix.embed(&vars)?;
    char_poly(&l, None, &MultiPoly::var(&vars, SHIFT)?)
}

/// An eigenvalue shift solving both conditions at a candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftRoot {
    pub value: Complex64,
    /// Present when the shift is certified exactly.
    pub exact: Option<GaussRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub value: Complex64,
    /// Present when the candidate is certified by an exact common root of
    /// the specialized conditions.
    pub exact: Option<GaussRational>,
    pub shifts: Vec<ShiftRoot>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CandidateSet {
    Points(Vec<Candidate>),
    /// The specialized resultant vanishes identically: degeneracies form a
    /// continuum in the target parameter.
    Continuum,
}

/// Numeric roots of the specialized resultant in `target`, each with the
/// shifts common to both specialized conditions.
///
/// A root is rationalized and certified when the exact conditions then share
/// a root in `omega0`. Otherwise it is kept when the numeric conditions share
/// a root to relative tolerance `1e-8`.
pub fn solve_candidates(
    resultant: &MultiPoly,
    conds: &DegeneracyConditions,
    target: &str,
    fixed: &BTreeMap<String, GaussRational>,
) -> Result<CandidateSet> {
    if fixed.contains_key(target) {
        return Err(Error::InvalidArgument(format!("target `{target}` is also fixed")));
    }
    let r = resultant.substitute_values(fixed)?;
    let unbound: Vec<String> = r
        .support()
        .into_iter()
        .filter(|v| *v != target)
        .map(String::from)
        .collect();
    if !unbound.is_empty() {
        return Err(Error::UnboundParameters(unbound));
    }
    if r.is_zero() {
        return Ok(CandidateSet::Continuum);
    }
    if !r.vars().contains(target) {
        return Err(Error::UnknownParameter(target.to_string()));
    }
    let specialized: Vec<MultiPoly> = conds
        .conditions
        .iter()
        .map(|c| c.substitute_values(fixed))
        .collect::<Result<_>>()?;

    let squarefree = UniPoly::from_multi(&r, target)?.squarefree_part()?;
    if squarefree.degree() == Some(0) {
        return Ok(CandidateSet::Points(Vec::new()));
    }
    let mut roots: Vec<Complex64> = Vec::new();
    for z in roots_aberth(&squarefree.to_complex())? {
        if roots.iter().all(|w| (w - z).norm() > DEDUP * (1.0 + z.norm())) {
            roots.push(z);
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let mut out = Vec::new();
    for value in roots {
        if let Some(c) = certify_exact(&specialized, target, value)? {
            out.push(c);
        } else {
            let shifts = numeric_shifts(&specialized, target, value)?;
            if !shifts.is_empty() {
                out.push(Candidate { value, exact: None, shifts });
            }
        }
    }
    Ok(CandidateSet::Points(out))
}

/// Rationalizes `value` and checks for an exact common shift.
fn certify_exact(conds: &[MultiPoly], target: &str, value: Complex64) -> Result<Option<Candidate>> {
    let Some(x) = GaussRational::approximate(value, MAX_DENOMINATOR) else {
        return Ok(None);
    };
    let mut at = BTreeMap::new();
    at.insert(target.to_string(), x.clone());
    let polys = conds
        .iter()
        .map(|c| UniPoly::from_multi(&c.substitute_values(&at)?, SHIFT))
        .collect::<Result<Vec<_>>>()?;
    let mut g = polys[0].clone();
    for p in &polys[1..] {
        g = g.gcd(p)?;
    }
    if g.degree().unwrap_or(0) == 0 {
        return Ok(None);
    }
    let shifts = roots_aberth(&g.to_complex())?
        .into_iter()
        .fold(Vec::<Complex64>::new(), |mut acc, z| {
            if acc.iter().all(|w| (w - z).norm() > DEDUP * (1.0 + z.norm())) {
                acc.push(z);
            }
            acc
        })
        .into_iter()
        .map(|z| {
            let exact = GaussRational::approximate(z, MAX_DENOMINATOR).filter(|q| g.eval(q).is_zero());
            ShiftRoot { value: exact.as_ref().map_or(z, GaussRational::to_complex), exact }
        })
        .collect();
    Ok(Some(Candidate {
        value: x.to_complex(),
        exact: Some(x),
        shifts,
    }))
}

/// Coefficients in `omega0` of a polynomial in `(target, omega0)` at a
/// numeric target value.
fn numeric_in_shift(c: &MultiPoly, target: &str, x: Complex64) -> Result<Vec<Complex64>> {
    let ti = c.vars().index_of(target)?;
    let si = c.vars().index_of(SHIFT)?;
    let mut out = vec![Complex64::new(0.0, 0.0); c.degree_in(SHIFT)? as usize + 1];
    for (e, coeff) in c.terms() {
        out[e.exps()[si] as usize] += coeff.to_complex() * x.powu(e.exps()[ti]);
    }
    Ok(out)
}

fn numeric_shifts(conds: &[MultiPoly], target: &str, x: Complex64) -> Result<Vec<ShiftRoot>> {
    let polys = conds
        .iter()
        .map(|c| numeric_in_shift(c, target, x))
        .collect::<Result<Vec<_>>>()?;
    let mut shifts: Vec<ShiftRoot> = Vec::new();
    for z in roots_aberth(&polys[0])? {
        let on_all = polys[1..].iter().all(|p| relative_residual(p, z) <= VERIFY);
        let fresh = shifts.iter().all(|s| (s.value - z).norm() > DEDUP * (1.0 + z.norm()));
        if on_all && fresh {
            shifts.push(ShiftRoot { value: z, exact: None });
        }
    }
    Ok(shifts)
}

/// `n − rank(L − λ·I)` over the Gaussian rationals.
pub fn geometric_multiplicity(l: &PolyMatrix, lambda: &GaussRational) -> Result<usize> {
    if !l.is_square() {
        return Err(Error::NotSquare {
            rows: l.nrows(),
            cols: l.ncols(),
        });
    }
    let n = l.nrows();
    let mut entries = l.to_constants().ok_or_else(|| {
        Error::Precondition("geometric multiplicity needs a matrix with every parameter bound".into())
    })?;
    for k in 0..n {
        entries[k * n + k] -= lambda;
    }
    Ok(n - rank(n, n, &entries))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    /// Exceptional point of the given order.
    Exceptional(u32),
    Diabolic,
    Inconclusive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Exceptional(n) => write!(f, "EP{n}"),
            Classification::Diabolic => write!(f, "diabolic"),
            Classification::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EPCandidate {
    pub param_values: BTreeMap<String, GaussRational>,
    pub omega0: GaussRational,
    pub classification: Classification,
    pub geom_mult: usize,
    pub alg_mult: usize,
    /// Polygon summary under the first seeded generic perturbation.
    pub polygon: String,
    /// Some rate is negative or not real.
    pub nonphysical: bool,
}

impl EPCandidate {
    pub fn to_json(&self) -> Value {
        json!({
            "params": self.param_values.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect::<serde_json::Map<_, _>>(),
            "omega0": self.omega0.to_string(),
            "classification": self.classification.to_string(),
            "geometric_multiplicity": self.geom_mult,
            "algebraic_multiplicity": self.alg_mult,
            "polygon": self.polygon,
            "nonphysical": self.nonphysical,
        })
    }
}

/// Some jump or loss rate evaluates to a negative or non-real number.
pub fn is_nonphysical(spec: &ModelSpec, values: &BTreeMap<String, GaussRational>) -> Result<bool> {
    for ch in spec.jumps.iter().chain(&spec.losses) {
        let rate = ch.rate.substitute_values(values)?;
        match rate.as_constant() {
            Some(r) if r.is_real() && !r.re.is_negative() => {}
            Some(_) => return Ok(true),
            None => return Err(Error::UnboundParameters(rate.support().into_iter().map(String::from).collect())),
        }
    }
    Ok(false)
}

/// Classifies the degenerate eigenvalue `omega0` at `values`.
///
/// The polygon of a generic perturbation is computed for seeds `seed`,
/// `seed + 1` and `seed + 2`; disagreement makes the result inconclusive.
/// Valuations of roots tending to zero decide the rest: a valuation `1/n`
/// with `n ≥ 2` and a geometric multiplicity below the algebraic one is an
/// exceptional point of order `n` (the largest such `n`); valuations all
/// equal to one with equal multiplicities is diabolic.
pub fn classify(
    spec: &ModelSpec,
    values: &BTreeMap<String, GaussRational>,
    omega0: &GaussRational,
    seed: u64,
) -> Result<EPCandidate> {
    let polygons = (0..3)
        .map(|k| {
            Experiment::new(spec, values, omega0.clone(), &Perturbation::Generic { seed: seed.wrapping_add(k) })
                .and_then(|e| e.polygon())
        })
        .collect::<Result<Vec<NewtonPolygon>>>()?;
    let exp = Experiment::new(spec, values, omega0.clone(), &Perturbation::Generic { seed })?;
    let alg_mult = exp.algebraic_multiplicity()? as usize;
    let geom_mult = geometric_multiplicity(&exp.liouvillian, omega0)?;

    let agree = polygons.windows(2).all(|w| w[0] == w[1]);
    let vanishing: Vec<Rational> = ep_orders(&polygons[0])
        .entries
        .into_iter()
        .filter_map(|(v, _)| match v {
            Valuation::Finite(r) if !r.is_zero() && !r.is_negative() => Some(r),
            _ => None,
        })
        .collect();
    let identically_zero = polygons[0].min_degree() > 0;
    let classification = if !agree || identically_zero || alg_mult < 2 {
        Classification::Inconclusive
    } else if let Some(n) = vanishing
        .iter()
        .filter(|r| r.numer() == &1.into() && r.denom() > &1.into())
        .filter_map(|r| u32::try_from(r.denom()).ok())
        .max()
        .filter(|_| geom_mult < alg_mult)
    {
        Classification::Exceptional(n)
    } else if vanishing.iter().all(Rational::is_one) && geom_mult == alg_mult {
        Classification::Diabolic
    } else {
        Classification::Inconclusive
    };
    Ok(EPCandidate {
        param_values: values.clone(),
        omega0: omega0.clone(),
        classification,
        geom_mult,
        alg_mult,
        polygon: polygons[0].summary(),
        nonphysical: is_nonphysical(spec, values)?,
    })
}

/// One candidate of a scan: a target value with one degenerate shift.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanEntry {
    pub value: Complex64,
    pub exact_value: Option<GaussRational>,
    pub omega0: Complex64,
    pub exact_omega0: Option<GaussRational>,
    /// Present when both the value and the shift are exact.
    pub candidate: Option<EPCandidate>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub target: String,
    pub fixed: BTreeMap<String, GaussRational>,
    pub continuum: bool,
    pub entries: Vec<ScanEntry>,
}

/// Full scan: symbolic conditions, elimination, candidate solving and
/// classification of every exactly certified candidate.
pub fn scan(
    spec: &ModelSpec,
    target: &str,
    fixed: &BTreeMap<String, GaussRational>,
    seed: u64,
) -> Result<ScanReport> {
    if !spec.params.iter().any(|p| p == target) {
        return Err(Error::UnknownParameter(target.to_string()));
    }
    if let Some(unknown) = fixed.keys().find(|k| !spec.params.contains(k)) {
        return Err(Error::UnknownParameter(unknown.clone()));
    }
    let conds = degeneracy_conditions(&symbolic_char_poly(spec)?, 2)?;
    // Binding the fixed parameters first keeps the resultant small.
    let bound = DegeneracyConditions {
        conditions: conds
            .conditions
            .iter()
            .map(|c| c.substitute_values(fixed))
            .collect::<Result<_>>()?,
        order: 2,
    };
    let resultant = eliminate_shift(&bound)?;
    let set = solve_candidates(&resultant, &bound, target, &BTreeMap::new())?;
    let CandidateSet::Points(candidates) = set else {
        return Ok(ScanReport {
            target: target.to_string(),
            fixed: fixed.clone(),
            continuum: true,
            entries: Vec::new(),
        });
    };
    let pending: Vec<(Candidate, ShiftRoot)> = candidates
        .into_iter()
        .flat_map(|c| c.shifts.clone().into_iter().map(move |s| (c.clone(), s)))
        .collect();
    let entries = pending
        .into_par_iter()
        .map(|(c, s)| {
            let candidate = match (&c.exact, &s.exact) {
                (Some(x), Some(w)) => {
                    let mut values = fixed.clone();
                    values.insert(target.to_string(), x.clone());
                    Some(classify(spec, &values, w, seed)?)
                }
                _ => None,
            };
            Ok(ScanEntry {
                value: c.value,
                exact_value: c.exact,
                omega0: s.value,
                exact_omega0: s.exact,
                candidate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanReport {
        target: target.to_string(),
        fixed: fixed.clone(),
        continuum: false,
        entries,
    })
}

fn complex_json(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

impl ScanReport {
    pub fn to_json(&self) -> Value {
        json!({
            "target": self.target,
            "fixed": self.fixed.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect::<serde_json::Map<_, _>>(),
            "continuum": self.continuum,
            "candidates": self.entries.iter().map(|e| json!({
                "value": e.exact_value.as_ref().map_or(Value::Null, |v| Value::String(v.to_string())),
                "value_numeric": complex_json(e.value),
                "omega0": e.exact_omega0.as_ref().map_or(Value::Null, |v| Value::String(v.to_string())),
                "omega0_numeric": complex_json(e.omega0),
                "classification": e.candidate.as_ref().map_or_else(
                    || Classification::Inconclusive.to_string(),
                    |c| c.classification.to_string(),
                ),
                "detail": e.candidate.as_ref().map_or(Value::Null, EPCandidate::to_json),
            })).collect::<Vec<_>>(),
        })
    }
}
