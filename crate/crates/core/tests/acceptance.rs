//! End-to-end checks with one PASS/FAIL line each. Exits non-zero when any
//! check fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use liouville_ep_core::analysis::Perturbation;
use liouville_ep_core::epscan::{
    degeneracy_conditions, eliminate_shift, geometric_multiplicity, scan, symbolic_char_poly, Classification,
};
use liouville_ep_core::exprparse::{format_poly, parse_expr};
use liouville_ep_core::lindblad::{build_liouvillian, builtin_model, BuiltinModel};
use liouville_ep_core::numlab::{amoeba_sample, encircle, fit_tentacles, log_grid, scaling_sweep, Branch};
use liouville_ep_core::polycore::{sylvester_resultant, MultiPoly, Rational, Vars};
use liouville_ep_core::tropgeo::{ep_orders, tentacle_directions, tropical_roots, tropicalize, NewtonPolygon, Valuation};
use num_complex::Complex64;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn qubit_degeneracy() -> Check {
    let start = Instant::now();
    let e = qubit_experiment(Perturbation::Param("J".into()));
    let p = e.unperturbed_char_poly().map_err(|x| x.to_string())?;
    let omega4 = parse_expr("omega^4", &e.vars).unwrap();
    ensure(p == omega4, || format!("shifted char poly is {p}"))?;
    let g = geometric_multiplicity(&e.liouvillian, &q("-1/2")).map_err(|x| x.to_string())?;
    ensure(g == 2, || format!("geometric multiplicity {g}"))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!("char poly = {p}, geometric multiplicity = {g}, {t:.2?}"))
}

fn newton_polygons() -> Check {
    let summaries: Vec<(&str, String)> = reference_experiments()
        .into_iter()
        .map(|(name, e)| (name, e.polygon().unwrap().summary()))
        .collect();
    ensure(summaries[0].1.split(", ").any(|s| s == "-1/2:2"), || {
        format!("spin-1/2 polygon {}", summaries[0].1)
    })?;
    ensure(summaries[1].1 == "-1:1, -1/3:3", || format!("qubit gamma_f polygon {}", summaries[1].1))?;
    ensure(summaries[2].1 == "vertical:2, -1/2:2", || format!("qubit J polygon {}", summaries[2].1))?;
    Ok(summaries
        .iter()
        .map(|(n, s)| format!("{n}: [{s}]"))
        .collect::<Vec<_>>()
        .join("; "))
}

fn tropical_equivalence() -> Check {
    let mut polys: Vec<MultiPoly> = reference_experiments()
        .into_iter()
        .map(|(_, e)| {
            // Restrict to (omega, epsilon) for the tropical computation.
            let f = e.shifted_char_poly().unwrap();
            let v = Vars::new(&["omega", "epsilon"]).unwrap();
            let mut out = MultiPoly::zero(&v);
            for (ex, c) in f.terms() {
                out = &out + &MultiPoly::monomial(&v, vec![ex.exps()[0], ex.exps()[1]], c.clone());
            }
            out
        })
        .collect();
    let mut r = rng(2024);
    polys.extend((0..200).map(|_| random_bivariate(&mut r)));
    for (k, f) in polys.iter().enumerate() {
        let finite: Vec<(Rational, u32)> = ep_orders(&NewtonPolygon::from_poly(f).unwrap())
            .finite()
            .into_iter()
            .collect();
        let trop = tropical_roots(&tropicalize(f).unwrap()).map_err(|x| x.to_string())?;
        ensure(trop == finite, || format!("polynomial {k} ({}) disagrees", format_poly(f)))?;
    }
    Ok(format!("{} polynomials agree", polys.len()))
}

fn amoeba_tentacles() -> Check {
    let expected: [&[&str]; 3] = [&["2"], &["1", "3"], &["2", "horizontal"]];
    let mut lines = Vec::new();
    for ((name, e), want) in reference_experiments().into_iter().zip(expected) {
        let start = Instant::now();
        let f = e.shifted_char_poly().unwrap();
        let cloud = amoeba_sample(&f, (1e-6, 1e-1), 40, 64).map_err(|x| x.to_string())?;
        // Tentacles of roots tending to zero; bounded roots give the
        // vertical tentacles, which are not part of the expected lists.
        let tentacles: Vec<_> = tentacle_directions(&e.polygon().unwrap())
            .into_iter()
            .filter(|t| t.valuation != Valuation::Finite(Rational::zero()))
            .collect();
        let fits = fit_tentacles(&cloud, &tentacles).map_err(|x| x.to_string())?;
        let mut got: Vec<String> = fits
            .iter()
            .map(|f| {
                if f.expected.is_horizontal() {
                    "horizontal".to_string()
                } else {
                    f.expected.slope.as_ref().map_or("vertical".into(), Rational::to_string)
                }
            })
            .collect();
        got.sort();
        ensure(got == want, || format!("{name}: expected tentacles {want:?}, polygon gives {got:?}"))?;
        for fit in &fits {
            let dev = fit.deviation.ok_or_else(|| format!("{name}: unsupported tentacle"))?;
            ensure(dev <= 0.15, || format!("{name}: tentacle {:?} off by {dev}", fit.expected.slope))?;
        }
        let t = start.elapsed();
        ensure(t < Duration::from_secs(30), || format!("{name}: took {t:?}"))?;
        let slopes: Vec<String> = fits
            .iter()
            .map(|f| format!("{:.3}", f.fitted_slope.unwrap_or(f64::NAN)))
            .collect();
        lines.push(format!("{name}: {} ({t:.2?})", slopes.join(", ")));
    }
    Ok(lines.join("; "))
}

fn scaling_fits() -> Check {
    let mut lines = Vec::new();
    for ((name, e), want) in reference_experiments().into_iter().zip([0.5, 1.0 / 3.0, 0.5]) {
        let (l0, l1) = e.numeric().unwrap();
        let r = scaling_sweep(&l0, &l1, e.omega0.to_complex(), &log_grid(1e-6, 1e-2, 25), Branch::Largest)
            .map_err(|x| format!("{name}: {x}"))?;
        ensure((r.fit.slope - want).abs() <= 0.05, || format!("{name}: slope {}", r.fit.slope))?;
        lines.push(format!("{name}: {:.4}", r.fit.slope));
    }
    Ok(lines.join("; "))
}

fn encircling() -> Check {
    let want: [&[usize]; 3] = [&[2, 1, 1], &[3, 1], &[2, 1, 1]];
    let mut lines = Vec::new();
    for ((name, e), want) in reference_experiments().into_iter().zip(want) {
        let (l0, l1) = e.numeric().unwrap();
        let r = encircle(&l0, &l1, 0.01, 400, 1).map_err(|x| format!("{name}: {x}"))?;
        ensure(r.report.cycles == want, || format!("{name}: cycles {:?}", r.report.cycles))?;
        lines.push(format!("{name}: {:?}", r.report.cycles));
    }
    Ok(lines.join("; "))
}

fn scan_completeness() -> Check {
    let (spec, _) = builtin_model(BuiltinModel::SpinHalf).unwrap();
    let conds = degeneracy_conditions(&symbolic_char_poly(&spec).unwrap(), 2).unwrap();
    let res = eliminate_shift(&conds).unwrap();
    let p = |s: &str| parse_expr(s, res.vars()).unwrap();
    for gx in ["gamma_y - Omega", "gamma_y + Omega", "-gamma_m/2 - gamma_y"] {
        let mut map = BTreeMap::new();
        map.insert("gamma_x".to_string(), p(gx));
        ensure(res.substitute(&map).unwrap().is_zero(), || format!("resultant nonzero at gamma_x = {gx}"))?;
    }
    let fourth = res
        .substitute_fraction(
            "gamma_x",
            &p("-gamma_m^2 - 4*gamma_m*gamma_y - 4*Omega^2"),
            &p("4*(gamma_m + 4*gamma_y)"),
        )
        .unwrap();
    ensure(fourth.is_zero(), || "resultant nonzero on the fourth regime".into())?;

    let fixed = bindings(&[("gamma_m", "0"), ("gamma_y", "2"), ("Omega", "1")]);
    let report = scan(&spec, "gamma_x", &fixed, 42).map_err(|x| x.to_string())?;
    let class = |x: &str, w: &str| {
        report
            .entries
            .iter()
            .find(|e| e.exact_value == Some(q(x)) && e.exact_omega0 == Some(q(w)))
            .and_then(|e| e.candidate.as_ref())
            .map(|c| c.classification)
    };
    ensure(class("1", "-3") == Some(Classification::Exceptional(2)), || {
        format!("gamma_x = 1: {:?}", class("1", "-3"))
    })?;
    ensure(class("3", "-5") == Some(Classification::Exceptional(2)), || {
        format!("gamma_x = 3: {:?}", class("3", "-5"))
    })?;
    ensure(class("-2", "0").is_some(), || "gamma_x = -2 missing".into())?;
    ensure(class("-1/8", "0") == Some(Classification::Diabolic), || {
        format!("gamma_x = -1/8: {:?}", class("-1/8", "0"))
    })?;
    let listed: Vec<String> = report
        .entries
        .iter()
        .filter_map(|e| {
            let c = e.candidate.as_ref()?;
            Some(format!("{}@{}:{}", e.exact_value.as_ref()?, c.omega0, c.classification))
        })
        .collect();
    Ok(format!("regimes annihilate the resultant; candidates {}", listed.join(", ")))
}

fn property_suites() -> Check {
    let mut r = rng(7);
    let v = Vars::new(&["x", "y", "z"]).unwrap();
    for _ in 0..50 {
        let (a, b, c) = (random_poly(&mut r, &v, 3, 4), random_poly(&mut r, &v, 3, 4), random_poly(&mut r, &v, 3, 4));
        ensure(&(&a * &b) * &c == &a * &(&b * &c) && &a * &(&b + &c) == &(&a * &b) + &(&a * &c) && &a + &b == &b + &a, || {
            "ring axiom violated".into()
        })?;
        let text = format_poly(&a);
        ensure(parse_expr(&text, &v).unwrap() == a, || format!("round trip failed for {text}"))?;
    }
    let v2 = Vars::new(&["x", "y"]).unwrap();
    for _ in 0..10 {
        let m = random_matrix(&mut r, &v2, 5, 2);
        ensure(m.det_bareiss().unwrap() == leibniz_det(&m), || "Bareiss disagrees with permutation expansion".into())?;
    }
    let vx = Vars::new(&["x", "y"]).unwrap();
    let x = MultiPoly::var(&vx, "x").unwrap();
    for _ in 0..20 {
        let root = random_poly(&mut r, &vx, 1, 2).substitute_values(&[("x".to_string(), q("0"))].into()).unwrap();
        let f = &(&x - &root) * &(&x + &random_poly(&mut r, &vx, 2, 3));
        let g = &(&x - &root) * &(&(&x * &x) + &random_poly(&mut r, &vx, 1, 3));
        ensure(sylvester_resultant(&f, &g, "x").unwrap().is_zero(), || "planted common root missed".into())?;
    }
    let (spin, _) = builtin_model(BuiltinModel::SpinHalf).unwrap();
    ensure(build_liouvillian(&spin).unwrap().is_trace_preserving(), || "spin-1/2 loses trace".into())?;
    for _ in 0..20 {
        ensure(build_liouvillian(&random_model(&mut r)).unwrap().is_trace_preserving(), || {
            "random model loses trace".into()
        })?;
    }
    let mut slopes = Vec::new();
    for n in 2..=4 {
        let (l0, l1) = companion(n);
        let fit = scaling_sweep(&l0, &l1, Complex64::new(0.0, 0.0), &log_grid(1e-6, 1e-2, 25), Branch::Largest)
            .map_err(|x| x.to_string())?
            .fit;
        ensure((fit.slope - 1.0 / n as f64).abs() <= 1e-3, || format!("companion n={n}: slope {}", fit.slope))?;
        slopes.push(format!("{:.5}", fit.slope));
    }
    Ok(format!("ring, determinant, resultant, trace, round-trip ok; companion slopes {}", slopes.join(", ")))
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Check); 8] = [
        ("qubit degeneracy", qubit_degeneracy),
        ("newton polygons", newton_polygons),
        ("tropical equivalence", tropical_equivalence),
        ("amoeba tentacles", amoeba_tentacles),
        ("scaling fits", scaling_fits),
        ("encircling permutations", encircling),
        ("scan completeness", scan_completeness),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (k, (name, check)) in checks.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} acceptance checks passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
