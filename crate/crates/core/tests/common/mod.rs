#![allow(dead_code)]

use std::collections::BTreeMap;

use liouville_ep_core::analysis::{Experiment, Perturbation};
use liouville_ep_core::lindblad::{builtin_model, BuiltinModel, Jump, ModelSpec};
use liouville_ep_core::numlab::CMatrix;
use liouville_ep_core::polycore::{GaussRational, MultiPoly, PolyMatrix, Rational, Vars};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(s: &str) -> GaussRational {
    GaussRational::real(s.parse().unwrap())
}

pub fn small_rational(r: &mut ChaCha8Rng, k: i64) -> Rational {
    Rational::new(r.gen_range(-k..=k), r.gen_range(1..=3)).unwrap()
}

pub fn small_gauss(r: &mut ChaCha8Rng, k: i64) -> GaussRational {
    let re = small_rational(r, k);
    let im = if r.gen_bool(0.3) { small_rational(r, k) } else { Rational::zero() };
    GaussRational::new(re, im)
}

pub fn random_poly(r: &mut ChaCha8Rng, vars: &Vars, max_deg: u32, max_terms: usize) -> MultiPoly {
    let n = r.gen_range(0..=max_terms);
    let terms = (0..n)
        .map(|_| {
            let mut exps = vec![0u32; vars.len()];
            let mut budget = r.gen_range(0..=max_deg);
            for e in exps.iter_mut() {
                let d = r.gen_range(0..=budget);
                *e = d;
                budget -= d;
            }
            MultiPoly::monomial(vars, exps, small_gauss(r, 4))
        })
        .collect::<Vec<_>>();
    terms.iter().fold(MultiPoly::zero(vars), |acc, t| &acc + t)
}

pub fn random_matrix(r: &mut ChaCha8Rng, vars: &Vars, n: usize, max_deg: u32) -> PolyMatrix {
    let rows = (0..n)
        .map(|_| (0..n).map(|_| random_poly(r, vars, max_deg, 3)).collect())
        .collect();
    PolyMatrix::from_rows(vars, rows).unwrap()
}

/// Determinant as the signed sum over all permutations.
pub fn leibniz_det(m: &PolyMatrix) -> MultiPoly {
    let n = m.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = MultiPoly::zero(m.vars());
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, m: &PolyMatrix, total: &mut MultiPoly) {
    let n = perm.len();
    if k == n {
        let inversions = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| perm[a] > perm[b])
            .count();
        let mut term = MultiPoly::one(m.vars());
        for (row, &col) in perm.iter().enumerate() {
            term = &term * m.get(row, col);
        }
        *total = if inversions % 2 == 0 { &*total + &term } else { &*total - &term };
        return;
    }
    for j in k..n {
        perm.swap(k, j);
        permute(perm, k + 1, m, total);
        perm.swap(k, j);
    }
}

/// Bivariate polynomial in `(omega, epsilon)` with at least two distinct
/// `omega` degrees.
pub fn random_bivariate(r: &mut ChaCha8Rng) -> MultiPoly {
    let v = Vars::new(&["omega", "epsilon"]).unwrap();
    loop {
        let n = r.gen_range(2..=7);
        let mut f = MultiPoly::zero(&v);
        for _ in 0..n {
            let i = r.gen_range(0..=6);
            let j = r.gen_range(0..=6);
            f = &f + &MultiPoly::monomial(&v, vec![i, j], small_gauss(r, 5));
        }
        let degrees: std::collections::BTreeSet<u32> = f.terms().map(|(e, _)| e.exps()[0]).collect();
        if degrees.len() >= 2 {
            return f;
        }
    }
}

/// Random Hermitian Hamiltonian and jump operators over parameters `a`, `b`.
pub fn random_model(r: &mut ChaCha8Rng) -> ModelSpec {
    let params = vec!["a".to_string(), "b".to_string()];
    let v = Vars::new(&params).unwrap();
    let n = r.gen_range(2..=3);
    let a = MultiPoly::var(&v, "a").unwrap();
    let b = MultiPoly::var(&v, "b").unwrap();
    let mut h = PolyMatrix::zeros(&v, n, n);
    for i in 0..n {
        h.set(i, i, &a.scale(&GaussRational::real(small_rational(r, 3))) + &MultiPoly::constant(&v, GaussRational::real(small_rational(r, 3))));
        for j in i + 1..n {
            let c = small_gauss(r, 3);
            h.set(i, j, a.scale(&c));
            h.set(j, i, a.scale(&c.conj()));
        }
    }
    let njumps = r.gen_range(1..=3);
    let jumps = (0..njumps)
        .map(|_| {
            let op = PolyMatrix::from_constants(
                &v,
                &(0..n).map(|_| (0..n).map(|_| small_gauss(r, 2)).collect()).collect::<Vec<_>>(),
            )
            .unwrap();
            let rate = if r.gen_bool(0.5) { b.clone() } else { MultiPoly::constant(&v, GaussRational::real(small_rational(r, 3))) };
            Jump { rate, operator: op }
        })
        .collect();
    ModelSpec::new("random", params, h, jumps, Vec::new()).unwrap()
}

/// Companion split of `ωⁿ − ε`: nilpotent shift plus a corner perturbation.
pub fn companion(n: usize) -> (CMatrix, CMatrix) {
    let mut l0 = CMatrix::zeros(n);
    for k in 0..n - 1 {
        l0.data[k * n + k + 1] = Complex64::new(1.0, 0.0);
    }
    let mut l1 = CMatrix::zeros(n);
    l1.data[(n - 1) * n] = Complex64::new(1.0, 0.0);
    (l0, l1)
}

pub fn bindings(pairs: &[(&str, &str)]) -> BTreeMap<String, GaussRational> {
    pairs.iter().map(|(k, v)| (k.to_string(), q(v))).collect()
}

pub fn qubit_bindings() -> BTreeMap<String, GaussRational> {
    bindings(&[("gamma_e", "1"), ("gamma_f", "0"), ("J", "1/4")])
}

pub fn spin_half_bindings() -> BTreeMap<String, GaussRational> {
    bindings(&[("Omega", "1"), ("gamma_m", "0"), ("gamma_x", "1"), ("gamma_y", "2")])
}

pub fn qubit_experiment(perturbation: Perturbation) -> Experiment {
    let (spec, _) = builtin_model(BuiltinModel::Qubit).unwrap();
    Experiment::new(&spec, &qubit_bindings(), q("-1/2"), &perturbation).unwrap()
}

pub fn spin_half_experiment(seed: u64) -> Experiment {
    let (spec, _) = builtin_model(BuiltinModel::SpinHalf).unwrap();
    Experiment::new(&spec, &spin_half_bindings(), q("-3"), &Perturbation::Generic { seed }).unwrap()
}

/// The three reference EP experiments, with their names.
pub fn reference_experiments() -> Vec<(&'static str, Experiment)> {
    vec![
        ("spin-1/2 generic", spin_half_experiment(42)),
        ("qubit gamma_f", qubit_experiment(Perturbation::Param("gamma_f".into()))),
        ("qubit J", qubit_experiment(Perturbation::Param("J".into()))),
    ]
}
