//! Python module `liouville_ep`.

use std::collections::{BTreeMap, HashMap};

use liouville_ep_core::analysis::{Experiment as CoreExperiment, Perturbation};
use liouville_ep_core::epscan;
use liouville_ep_core::exprparse::parse_expr;
use liouville_ep_core::lindblad::{build_liouvillian, builtin_model, BuiltinModel, ModelSpec};
use liouville_ep_core::numlab::{amoeba_sample, encircle, fit_tentacles, log_grid, scaling_sweep, Branch};
use liouville_ep_core::polycore::{GaussRational, Vars};
use liouville_ep_core::tropgeo::{ep_orders, tentacle_directions, NewtonPolygon};
use liouville_ep_core::{Error, ErrorKind};
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(liouville_ep, PreconditionError, PyValueError);
create_exception!(liouville_ep, NumericalError, PyArithmeticError);

fn to_py(e: Error) -> PyErr {
    match e.kind() {
        ErrorKind::Input => PyValueError::new_err(e.to_string()),
        ErrorKind::Precondition => PreconditionError::new_err(e.to_string()),
        ErrorKind::Numerical => NumericalError::new_err(e.to_string()),
    }
}

fn constant(text: &str) -> PyResult<GaussRational> {
    let p = parse_expr(text, &Vars::empty()).map_err(to_py)?;
    Ok(p.as_constant().expect("no variables"))
}

fn bindings(values: HashMap<String, String>) -> PyResult<BTreeMap<String, GaussRational>> {
    values.into_iter().map(|(k, v)| Ok((k, constant(&v)?))).collect()
}

/// `json.loads` of a serialized report.
fn from_json<'py>(py: Python<'py>, value: &impl std::fmt::Display) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value.to_string(),))
}

/// A Lindblad model with symbolic parameters.
#[pyclass(name = "Model", frozen)]
struct Model {
    spec: ModelSpec,
}

#[pymethods]
impl Model {
    /// Built-in model by name: `spin_half` or `qubit`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        let which: BuiltinModel = name.parse().map_err(to_py)?;
        let (spec, _) = builtin_model(which).map_err(to_py)?;
        Ok(Self { spec })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.spec.name
    }

    #[getter]
    fn params(&self) -> Vec<String> {
        self.spec.params.clone()
    }

    /// Liouvillian entries as exact strings, with `bindings` substituted.
    #[pyo3(signature = (bindings = HashMap::new()))]
    fn liouvillian(&self, bindings: HashMap<String, String>) -> PyResult<Vec<Vec<String>>> {
        let values = self::bindings(bindings)?;
        let l = build_liouvillian(&self.spec).map_err(to_py)?;
        let m = l.matrix.substitute_values(&values).map_err(to_py)?;
        Ok(m.rows().map(|r| r.iter().map(|p| p.to_string()).collect()).collect())
    }

    fn is_trace_preserving(&self) -> PyResult<bool> {
        Ok(build_liouvillian(&self.spec).map_err(to_py)?.is_trace_preserving())
    }

    /// Degenerate points along `target` with the other parameters fixed.
    #[pyo3(signature = (target, fixed, seed = 42))]
    fn scan<'py>(
        &self,
        py: Python<'py>,
        target: &str,
        fixed: HashMap<String, String>,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let report = epscan::scan(&self.spec, target, &bindings(fixed)?, seed).map_err(to_py)?;
        from_json(py, &report.to_json())
    }

    fn __repr__(&self) -> String {
        format!("Model({:?}, params={:?})", self.spec.name, self.spec.params)
    }
}

/// A model at a degenerate eigenvalue `omega0` with a perturbation direction.
#[pyclass(name = "Experiment", frozen)]
struct Experiment {
    exp: CoreExperiment,
    bindings: BTreeMap<String, GaussRational>,
}

impl Experiment {
    fn polygon_(&self) -> PyResult<NewtonPolygon> {
        self.exp.polygon().map_err(to_py)
    }
}

#[pymethods]
impl Experiment {
    /// `perturb` is a parameter name or `generic`.
    #[new]
    #[pyo3(signature = (model, bindings, omega0, perturb = "generic", seed = 42))]
    fn new(model: &Model, bindings: HashMap<String, String>, omega0: &str, perturb: &str, seed: u64) -> PyResult<Self> {
        let bindings = self::bindings(bindings)?;
        let perturbation = match perturb.parse::<Perturbation>().map_err(to_py)? {
            Perturbation::Generic { .. } if perturb == "generic" => Perturbation::Generic { seed },
            other => other,
        };
        let exp = CoreExperiment::new(&model.spec, &bindings, constant(omega0)?, &perturbation).map_err(to_py)?;
        Ok(Self { exp, bindings })
    }

    /// Shifted characteristic polynomial in `omega` and `epsilon`.
    fn char_poly(&self) -> PyResult<String> {
        Ok(self.exp.shifted_char_poly().map_err(to_py)?.to_string())
    }

    /// Lower-hull summary such as `"-1:1, -1/3:3"`.
    fn polygon(&self) -> PyResult<String> {
        Ok(self.polygon_()?.summary())
    }

    fn polygon_json<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        from_json(py, &self.polygon_()?.to_json())
    }

    /// Root valuations with multiplicities.
    fn valuations<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        from_json(py, &ep_orders(&self.polygon_()?).to_json())
    }

    #[pyo3(signature = (seed = 42))]
    fn classify<'py>(&self, py: Python<'py>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let c = epscan::classify(&self.exp.spec, &self.bindings, &self.exp.omega0, seed).map_err(to_py)?;
        from_json(py, &c.to_json())
    }

    /// Power-law fit of `|omega(eps) - omega0|` against `eps`.
    #[pyo3(signature = (eps_min = 1e-6, eps_max = 1e-2, points = 25, branch = "largest"))]
    fn scaling<'py>(
        &self,
        py: Python<'py>,
        eps_min: f64,
        eps_max: f64,
        points: usize,
        branch: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let branch = match branch {
            "largest" => Branch::Largest,
            "smallest" => Branch::Smallest,
            k => Branch::Index(
                k.parse()
                    .map_err(|_| PyValueError::new_err(format!("unknown branch `{k}`")))?,
            ),
        };
        let (l0, l1) = self.exp.numeric().map_err(to_py)?;
        let grid = log_grid(eps_min, eps_max, points);
        let r = scaling_sweep(&l0, &l1, self.exp.omega0.to_complex(), &grid, branch).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("slope", r.fit.slope)?;
        d.set_item("intercept", r.fit.intercept)?;
        d.set_item("rsquared", r.fit.rsquared)?;
        d.set_item("cluster_size", r.cluster_size)?;
        d.set_item("epsilon", r.samples.iter().map(|s| s.epsilon).collect::<Vec<_>>())?;
        d.set_item("magnitude", r.samples.iter().map(|s| s.log_mag.exp()).collect::<Vec<_>>())?;
        Ok(d)
    }

    /// Eigenvalue permutation after `loops` turns of `L0 + r e^{it} L1`.
    #[pyo3(signature = (radius = 0.01, steps = 400, loops = 1))]
    fn encircle<'py>(&self, py: Python<'py>, radius: f64, steps: usize, loops: usize) -> PyResult<Bound<'py, PyDict>> {
        let (l0, l1) = self.exp.numeric().map_err(to_py)?;
        let r = encircle(&l0, &l1, radius, steps, loops).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("permutation", r.report.permutation)?;
        d.set_item("cycles", r.report.cycles)?;
        d.set_item("tracking_residual", r.report.tracking_residual)?;
        d.set_item("min_gap", r.report.min_gap)?;
        Ok(d)
    }

    /// Amoeba tentacle fits: list of `(valuation, expected_slope, fitted_slope)`.
    #[pyo3(signature = (eps_min = 1e-6, eps_max = 1e-1, eps_points = 40, phases = 64))]
    fn amoeba(
        &self,
        eps_min: f64,
        eps_max: f64,
        eps_points: usize,
        phases: usize,
    ) -> PyResult<Vec<(String, Option<String>, Option<f64>)>> {
        let f = self.exp.shifted_char_poly().map_err(to_py)?;
        let cloud = amoeba_sample(&f, (eps_min, eps_max), eps_points, phases).map_err(to_py)?;
        let fits = fit_tentacles(&cloud, &tentacle_directions(&self.polygon_()?)).map_err(to_py)?;
        Ok(fits
            .into_iter()
            .map(|t| {
                let slope = t.expected.slope.as_ref().map(|s| s.to_string());
                (t.expected.valuation.to_string(), slope, t.fitted_slope)
            })
            .collect())
    }
}

#[pymodule]
fn liouville_ep(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Experiment>()?;
    m.add("PreconditionError", m.py().get_type::<PreconditionError>())?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    Ok(())
}
