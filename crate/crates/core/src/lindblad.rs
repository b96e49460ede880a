//! Vectorized Lindblad superoperators, the built-in models, perturbation
//! matrices and shifted characteristic polynomials.
//!
//! Density matrices are flattened row-major, so `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exprparse::parse_expr;
use crate::polycore::{GaussRational, MultiPoly, PolyMatrix, Rational, Vars};

/// Spectral variable of the characteristic polynomial.
pub const OMEGA: &str = "omega";
/// Perturbation strength.
pub const EPSILON: &str = "epsilon";
/// Shift moving the degenerate eigenvalue to `omega = 0`.
pub const SHIFT: &str = "omega0";

/// `[omega, epsilon, omega0, params...]`, the variable list of every
/// characteristic-polynomial computation.
pub fn spectral_vars<S: AsRef<str>>(params: &[S]) -> Result<Vars> {
    let mut names = vec![OMEGA.to_string(), EPSILON.to_string(), SHIFT.to_string()];
    for p in params {
        let p = p.as_ref();
        if names.iter().any(|n| n == p) {
            return Err(Error::InvalidArgument(format!(
                "parameter name `{p}` clashes with a reserved variable"
            )));
        }
        names.push(p.to_string());
    }
    Vars::new(&names)
}

/// Position of `ρ[row][col]` in the flattened density matrix.
pub fn flatten_index(row: usize, col: usize, n: usize) -> Result<usize> {
    if row >= n || col >= n {
        return Err(Error::IndexOutOfRange(format!(
            "({row}, {col}) in a {n}x{n} matrix"
        )));
    }
    Ok(row * n + col)
}

/// A dissipation channel `rate · D[operator]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jump {
    pub rate: MultiPoly,
    pub operator: PolyMatrix,
}

/// Hamiltonian, jump channels and parameters of an open system.
///
/// `losses` are channels whose refilling term `ΓρΓ†` is dropped, keeping only
/// `-½{Γ†Γ, ρ}`. They model decay out of the represented subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub dim: usize,
    pub params: Vec<String>,
    pub hamiltonian: PolyMatrix,
    pub jumps: Vec<Jump>,
    pub losses: Vec<Jump>,
}

impl ModelSpec {
    /// Validates dimensions, variable lists, reserved names and Hermiticity.
    pub fn new(
        name: impl Into<String>,
        params: Vec<String>,
        hamiltonian: PolyMatrix,
        jumps: Vec<Jump>,
        losses: Vec<Jump>,
    ) -> Result<Self> {
        let vars = hamiltonian.vars().clone();
        if vars.names() != params.as_slice() {
            return Err(Error::VariableMismatch {
                left: params.join(", "),
                right: vars.names().join(", "),
            });
        }
        spectral_vars(&params)?;
        let dim = hamiltonian.nrows();
        if !hamiltonian.is_square() {
            return Err(Error::NotSquare {
                rows: hamiltonian.nrows(),
                cols: hamiltonian.ncols(),
            });
        }
        for (k, j) in jumps.iter().chain(&losses).enumerate() {
            if j.operator.nrows() != dim || j.operator.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "channel {k} operator is {}x{}, hamiltonian is {dim}x{dim}",
                    j.operator.nrows(),
                    j.operator.ncols()
                )));
            }
            if j.operator.vars() != &vars || j.rate.vars() != &vars {
                return Err(Error::VariableMismatch {
                    left: vars.names().join(", "),
                    right: j.operator.vars().names().join(", "),
                });
            }
        }
        if hamiltonian.adjoint() != hamiltonian {
            return Err(Error::InvalidArgument("hamiltonian is not Hermitian".into()));
        }
        Ok(Self {
            name: name.into(),
            dim,
            params,
            hamiltonian,
            jumps,
            losses,
        })
    }

    pub fn vars(&self) -> &Vars {
        self.hamiltonian.vars()
    }
}

/// An `n² × n²` superoperator acting on row-major flattened density matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    pub matrix: PolyMatrix,
}

impl Superoperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `vec(I)ᵀ · L`, which vanishes for trace-preserving generators.
    pub fn trace_row(&self) -> Vec<MultiPoly> {
        let n2 = self.matrix.nrows();
        let n = (n2 as f64).sqrt().round() as usize;
        (0..n2)
            .map(|c| {
                (0..n).fold(MultiPoly::zero(self.matrix.vars()), |acc, k| {
                    &acc + self.matrix.get(k * n + k, c)
                })
            })
            .collect()
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_row().iter().all(MultiPoly::is_zero)
    }
}

fn dissipator(rate: &MultiPoly, op: &PolyMatrix, refill: bool) -> Result<PolyMatrix> {
    let vars = op.vars();
    let id = PolyMatrix::identity(vars, op.nrows());
    let gg = op.adjoint().checked_mul(op)?;
    let half = MultiPoly::constant(vars, GaussRational::real(Rational::new(-1, 2)?));
    let mut d = gg
        .kron(&id)?
        .checked_add(&id.kron(&gg.transpose())?)?
        .scale_poly(&half);
    if refill {
        d = d.checked_add(&op.kron(&op.conj())?)?;
    }
    Ok(d.scale_poly(rate))
}

/// `-i(H⊗I − I⊗Hᵀ) + Σ rate·(Γ⊗Γ̄ − ½Γ†Γ⊗I − ½I⊗(Γ†Γ)ᵀ)`, with loss channels
/// contributing only their anticommutator part.
pub fn build_liouvillian(m: &ModelSpec) -> Result<Superoperator> {
    let vars = m.vars();
    let id = PolyMatrix::identity(vars, m.dim);
    let minus_i = MultiPoly::constant(vars, -GaussRational::i());
    let h = &m.hamiltonian;
    let mut l = h
        .kron(&id)?
        .checked_sub(&id.kron(&h.transpose())?)?
        .scale_poly(&minus_i);
    for j in &m.jumps {
        l = l.checked_add(&dissipator(&j.rate, &j.operator, true)?)?;
    }
    for j in &m.losses {
        l = l.checked_add(&dissipator(&j.rate, &j.operator, false)?)?;
    }
    Ok(Superoperator { matrix: l })
}

/// No-jump part and quantum-jump part of a hybrid Liouvillian.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridSplit {
    pub no_jump: Superoperator,
    pub jumps: Superoperator,
}

impl HybridSplit {
    pub fn effective(&self) -> Result<Superoperator> {
        Ok(Superoperator {
            matrix: self.no_jump.matrix.checked_add(&self.jumps.matrix)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinModel {
    SpinHalf,
    Qubit,
}

impl std::str::FromStr for BuiltinModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spin_half" => Ok(Self::SpinHalf),
            "qubit" => Ok(Self::Qubit),
            _ => Err(Error::UnknownModel(s.to_string())),
        }
    }
}

impl BuiltinModel {
    pub fn name(self) -> &'static str {
        match self {
            Self::SpinHalf => "spin_half",
            Self::Qubit => "qubit",
        }
    }
}

fn parse_matrix(rows: &[&[&str]], vars: &Vars) -> Result<PolyMatrix> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|e| parse_expr(e, vars)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    PolyMatrix::from_rows(vars, rows)
}

fn channel(rate: &str, op: &[&[&str]], vars: &Vars) -> Result<Jump> {
    Ok(Jump {
        rate: parse_expr(rate, vars)?,
        operator: parse_matrix(op, vars)?,
    })
}

/// Spin one-half in the basis (up, down): `H = Ω/2 σz` with decay through
/// `σ−`, `σx` and `σy`.
fn spin_half() -> Result<ModelSpec> {
    let params: Vec<String> = ["Omega", "gamma_m", "gamma_x", "gamma_y"]
        .map(String::from)
        .to_vec();
    let v = Vars::new(&params)?;
    let h = parse_matrix(&[&["Omega/2", "0"], &["0", "-Omega/2"]], &v)?;
    let jumps = vec![
        channel("gamma_m", &[&["0", "0"], &["1", "0"]], &v)?,
        channel("gamma_x", &[&["0", "1"], &["1", "0"]], &v)?,
        channel("gamma_y", &[&["0", "-i"], &["i", "0"]], &v)?,
    ];
    ModelSpec::new("spin_half", params, h, jumps, Vec::new())
}

/// Driven qubit on the upper two levels (e, f) of a decaying three-level
/// system, in the basis (e, f). Decay f→e is a jump channel; decay e→g
/// leaves the subspace and is a loss.
fn qubit() -> Result<(ModelSpec, HybridSplit)> {
    let params: Vec<String> = ["gamma_e", "gamma_f", "J"].map(String::from).to_vec();
    let v = Vars::new(&params)?;
    let h = parse_matrix(&[&["0", "J"], &["J", "0"]], &v)?;
    let jumps = vec![channel("gamma_f", &[&["0", "1"], &["0", "0"]], &v)?];
    let losses = vec![channel("gamma_e", &[&["1", "0"], &["0", "0"]], &v)?];
    let spec = ModelSpec::new("qubit", params, h, jumps, losses)?;
    let no_jump = parse_matrix(
        &[
            &["-gamma_e", "i*J", "-i*J", "0"],
            &["i*J", "-(gamma_e + gamma_f)/2", "0", "-i*J"],
            &["-i*J", "0", "-(gamma_e + gamma_f)/2", "i*J"],
            &["0", "-i*J", "i*J", "-gamma_f"],
        ],
        &v,
    )?;
    let jump_part = parse_matrix(
        &[
            &["0", "0", "0", "gamma_f"],
            &["0", "0", "0", "0"],
            &["0", "0", "0", "0"],
            &["0", "0", "0", "0"],
        ],
        &v,
    )?;
    let split = HybridSplit {
        no_jump: Superoperator { matrix: no_jump },
        jumps: Superoperator { matrix: jump_part },
    };
    Ok((spec, split))
}

/// A built-in model, with its hybrid split when it has one.
pub fn builtin_model(model: BuiltinModel) -> Result<(ModelSpec, Option<HybridSplit>)> {
    match model {
        BuiltinModel::SpinHalf => Ok((spin_half()?, None)),
        BuiltinModel::Qubit => qubit().map(|(s, h)| (s, Some(h))),
    }
}

/// `∂L/∂param`, entrywise.
pub fn perturbation_matrix(l: &Superoperator, param: &str) -> Result<PolyMatrix> {
    if !l.matrix.vars().contains(param) || [OMEGA, EPSILON, SHIFT].contains(&param) {
        return Err(Error::UnknownParameter(param.to_string()));
    }
    l.matrix.derivative(param)
}

/// Seeded `n × n` matrix of Gaussian integers with parts uniform in `-9..=9`.
pub fn generic_perturbation(n: usize, seed: u64, vars: &Vars) -> PolyMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<GaussRational>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let re = rng.gen_range(-9i64..=9);
                    let im = rng.gen_range(-9i64..=9);
                    GaussRational::new(Rational::from_int(re), Rational::from_int(im))
                })
                .collect()
        })
        .collect();
    PolyMatrix::from_constants(vars, &rows).expect("non-empty matrix")
}

/// `det(L0 + ε·L1 − (ω + shift)·I)`. All inputs must live over one variable
/// list containing `omega` (and `epsilon` when `l1` is given).
pub fn char_poly(l0: &PolyMatrix, l1: Option<&PolyMatrix>, shift: &MultiPoly) -> Result<MultiPoly> {
    let vars = l0.vars();
    if !l0.is_square() {
        return Err(Error::NotSquare {
            rows: l0.nrows(),
            cols: l0.ncols(),
        });
    }
    let n = l0.nrows();
    let omega = MultiPoly::var(vars, OMEGA)?;
    let mut m = l0.clone();
    if let Some(l1) = l1 {
        if l1.nrows() != n || l1.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "perturbation is {}x{}, Liouvillian is {n}x{n}",
                l1.nrows(),
                l1.ncols()
            )));
        }
        let eps = MultiPoly::var(vars, EPSILON)?;
        m = m.checked_add(&l1.scale_poly(&eps))?;
    }
    let diag = omega.checked_add(shift)?;
    for k in 0..n {
        let e = m.get(k, k).checked_sub(&diag)?;
        m.set(k, k, e);
    }
    m.det_bareiss()
}

/// Substitutes exact parameter values into every entry.
pub fn bind(m: &PolyMatrix, values: &BTreeMap<String, GaussRational>) -> Result<PolyMatrix> {
    m.substitute_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprparse::format_poly;

    fn qubit_spec() -> (ModelSpec, HybridSplit) {
        let (s, h) = builtin_model(BuiltinModel::Qubit).unwrap();
        (s, h.unwrap())
    }

    fn q(s: &str) -> GaussRational {
        GaussRational::real(s.parse().unwrap())
    }

    #[test]
    fn flattening_order() {
        assert_eq!(flatten_index(0, 0, 2).unwrap(), 0);
        assert_eq!(flatten_index(0, 1, 2).unwrap(), 1);
        assert_eq!(flatten_index(1, 0, 2).unwrap(), 2);
        assert_eq!(flatten_index(1, 1, 2).unwrap(), 3);
        assert!(flatten_index(2, 0, 2).is_err());
    }

    #[test]
    fn qubit_liouvillian_matches_split() {
        let (spec, split) = qubit_spec();
        let built = build_liouvillian(&spec).unwrap();
        assert_eq!(built, split.effective().unwrap());
        let row: Vec<String> = split.no_jump.matrix.rows().next().unwrap().iter().map(format_poly).collect();
        assert_eq!(row, ["-gamma_e", "i*J", "-i*J", "0"]);
        let nz: Vec<(usize, usize)> = (0..4)
            .flat_map(|r| (0..4).map(move |c| (r, c)))
            .filter(|&(r, c)| !split.jumps.matrix.get(r, c).is_zero())
            .collect();
        assert_eq!(nz, [(0, 3)]);
    }

    #[test]
    fn parameter_lists() {
        let (spin, split) = builtin_model(BuiltinModel::SpinHalf).unwrap();
        assert!(split.is_none());
        assert_eq!(spin.params, ["Omega", "gamma_m", "gamma_x", "gamma_y"]);
        assert_eq!(qubit_spec().0.params, ["gamma_e", "gamma_f", "J"]);
        assert!(matches!("qutrit".parse::<BuiltinModel>(), Err(Error::UnknownModel(_))));
    }

    #[test]
    fn spin_half_is_trace_preserving() {
        let (spin, _) = builtin_model(BuiltinModel::SpinHalf).unwrap();
        assert!(build_liouvillian(&spin).unwrap().is_trace_preserving());
        // Losses deliberately leak population out of the qubit subspace.
        let (qubit, _) = qubit_spec();
        assert!(!build_liouvillian(&qubit).unwrap().is_trace_preserving());
    }

    #[test]
    fn gamma_f_perturbation() {
        let (spec, _) = qubit_spec();
        let l = build_liouvillian(&spec).unwrap();
        let d = perturbation_matrix(&l, "gamma_f").unwrap();
        let h = q("-1/2");
        let mut expected = vec![vec![GaussRational::zero(); 4]; 4];
        expected[0][3] = q("1");
        expected[1][1] = h.clone();
        expected[2][2] = h;
        expected[3][3] = q("-1");
        assert_eq!(d, PolyMatrix::from_constants(l.matrix.vars(), &expected).unwrap());
        assert!(perturbation_matrix(&l, "gamma_q").is_err());
    }

    #[test]
    fn j_perturbation_is_the_coupling_pattern() {
        let (_, split) = qubit_spec();
        let l = split.effective().unwrap();
        let d = perturbation_matrix(&l, "J").unwrap();
        let mut values = BTreeMap::new();
        values.insert("J".to_string(), q("1"));
        for name in ["gamma_e", "gamma_f"] {
            values.insert(name.to_string(), q("0"));
        }
        assert_eq!(d, bind(&l.matrix, &values).unwrap());
    }

    #[test]
    fn omega_free_entries_have_zero_derivative() {
        let (spin, _) = builtin_model(BuiltinModel::SpinHalf).unwrap();
        let l = build_liouvillian(&spin).unwrap();
        let d = perturbation_matrix(&l, "Omega").unwrap();
        assert!(d.get(0, 0).is_zero());
        assert!(d.get(0, 3).is_zero());
        assert!(!d.get(1, 1).is_zero());
    }

    #[test]
    fn generic_perturbation_is_seeded() {
        let v = Vars::new(&["x"]).unwrap();
        assert_eq!(generic_perturbation(4, 42, &v), generic_perturbation(4, 42, &v));
        assert_ne!(generic_perturbation(4, 42, &v), generic_perturbation(4, 43, &v));
    }

    #[test]
    fn one_by_one_char_poly() {
        let v = spectral_vars::<&str>(&[]).unwrap();
        let l0 = PolyMatrix::zeros(&v, 1, 1);
        let p = char_poly(&l0, None, &MultiPoly::zero(&v)).unwrap();
        assert_eq!(p, -MultiPoly::var(&v, OMEGA).unwrap());
    }

    #[test]
    fn qubit_ep_char_poly_is_fourth_power() {
        let (spec, split) = qubit_spec();
        let v = spectral_vars(&spec.params).unwrap();
        let l = split.effective().unwrap().matrix.embed(&v).unwrap();
        let mut values = BTreeMap::new();
        values.insert("gamma_e".to_string(), q("1"));
        values.insert("gamma_f".to_string(), q("0"));
        values.insert("J".to_string(), q("1/4"));
        let l = bind(&l, &values).unwrap();
        let shift = MultiPoly::constant(&v, q("-1/2"));
        let p = char_poly(&l, None, &shift).unwrap();
        assert_eq!(p, MultiPoly::var(&v, OMEGA).unwrap().pow(4));
    }

    #[test]
    fn rejects_non_hermitian_hamiltonian() {
        let v = Vars::new(&["J"]).unwrap();
        let h = parse_matrix(&[&["0", "i*J"], &["i*J", "0"]], &v).unwrap();
        assert!(ModelSpec::new("bad", vec!["J".into()], h, vec![], vec![]).is_err());
    }
}
