//! Python bindings: scenarios, ramification data and the command verbs.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use nbval::galois::GaloisVector;
use nbval::lab::{self, Scenario, Suite, DEFAULT_TRIALS};
use nbval::normalbasis::{nb_test, trace_valuation};
use nbval::Error;

create_exception!(pynbval, NbvalError, PyException, "Base class for nbval errors.");
create_exception!(pynbval, InconclusiveError, NbvalError, "A decision needed more precision than the cap allows.");
create_exception!(pynbval, StructuralError, NbvalError, "An identity that must hold was violated.");
create_exception!(pynbval, InvalidInputError, NbvalError, "The scenario or arguments are unusable.");

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Inconclusive { .. } => InconclusiveError::new_err(e.to_string()),
        Error::Structural(_) => StructuralError::new_err(e.to_string()),
        _ => InvalidInputError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A scenario with its field contexts, rebuilt at higher precision on demand.
#[pyclass(module = "pynbval", name = "Lab", frozen)]
struct PyLab {
    inner: lab::Lab,
}

#[pymethods]
impl PyLab {
    /// Build from scenario TOML text.
    #[new]
    #[pyo3(signature = (toml, precision_cap = None))]
    fn new(py: Python<'_>, toml: &str, precision_cap: Option<i64>) -> PyResult<Self> {
        let scenario = Scenario::parse(toml).map_err(to_py_err)?;
        let inner = py.detach(|| lab::Lab::new(scenario, precision_cap)).map_err(to_py_err)?;
        Ok(PyLab { inner })
    }

    /// Build from a scenario file.
    #[staticmethod]
    #[pyo3(signature = (path, precision_cap = None))]
    fn from_file(py: Python<'_>, path: std::path::PathBuf, precision_cap: Option<i64>) -> PyResult<Self> {
        let scenario = Scenario::load(&path).map_err(to_py_err)?;
        let inner = py.detach(|| lab::Lab::new(scenario, precision_cap)).map_err(to_py_err)?;
        Ok(PyLab { inner })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.base().n.p()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.base().n.n()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.base().n.degree()
    }

    #[getter]
    fn precision(&self) -> i64 {
        self.inner.base().precision()
    }

    #[getter]
    fn precision_cap(&self) -> i64 {
        self.inner.cap()
    }

    #[getter]
    fn lower_breaks(&self) -> Vec<i64> {
        self.inner.base().data.lower_breaks.clone()
    }

    /// Upper breaks as `(numerator, denominator)` pairs.
    #[getter]
    fn upper_breaks(&self) -> Vec<(i64, i64)> {
        self.inner.base().data.upper_breaks.iter().map(|r| (*r.numer(), *r.denom())).collect()
    }

    #[getter]
    fn t_g(&self) -> i64 {
        self.inner.base().data.t_g
    }

    #[getter]
    fn b_max(&self) -> i64 {
        self.inner.base().data.b_max
    }

    /// Whether every upper break is prime to `p`.
    #[getter]
    fn hypothesis_ok(&self) -> bool {
        self.inner.base().data.hypothesis_ok
    }

    /// The full ramification data as a dict.
    fn ramification<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.base().data)
    }

    /// Normal basis test of the monomial `π_K^q x^exps`, escalating
    /// precision as needed. Returns the verdict dict and the valuation of
    /// its trace to `K`.
    #[pyo3(signature = (exps, q = 0))]
    fn nb_test_monomial<'py>(&self, py: Python<'py>, exps: Vec<u32>, q: i64) -> PyResult<Bound<'py, PyDict>> {
        let base = self.inner.base();
        if exps.len() != base.n.n() || exps.iter().any(|&e| e >= base.n.p()) {
            return Err(InvalidInputError::new_err(format!(
                "exponents must be {} values in [0, {})",
                base.n.n(),
                base.n.p()
            )));
        }
        let exps = GaloisVector(exps);
        let ((verdict, trace_v), prec) = py
            .detach(|| {
                self.inner.escalate(|c| {
                    let rho = c.n.monomial(&exps, &c.k.uniformizer_pow(q));
                    let verdict = nb_test(&c.n, &rho)?;
                    let tv = match trace_valuation(&c.n, &rho) {
                        Ok(v) => Some(v),
                        Err(e) if e.is_inconclusive() => None,
                        Err(e) => return Err(e),
                    };
                    Ok((verdict, tv))
                })
            })
            .map_err(to_py_err)?;
        let out = PyDict::new(py);
        out.set_item("verdict", to_py(py, &verdict)?)?;
        out.set_item("trace_valuation", trace_v)?;
        out.set_item("precision", prec)?;
        Ok(out)
    }

    fn build<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let doc = py.detach(|| lab::cmd_build(&self.inner));
        to_py(py, &doc)
    }

    #[pyo3(signature = (seed = 0))]
    fn ramify<'py>(&self, py: Python<'py>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let doc = py.detach(|| lab::cmd_ramify(&self.inner, seed));
        to_py(py, &doc)
    }

    #[pyo3(signature = (valuation, trials = DEFAULT_TRIALS, seed = 0))]
    fn nbtest<'py>(&self, py: Python<'py>, valuation: i64, trials: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let doc = py.detach(|| lab::cmd_nbtest(&self.inner, valuation, trials, seed));
        to_py(py, &doc)
    }

    fn rhov<'py>(&self, py: Python<'py>, valuation: i64) -> PyResult<Bound<'py, PyAny>> {
        let doc = py.detach(|| lab::cmd_rhov(&self.inner, valuation)).map_err(to_py_err)?;
        to_py(py, &doc)
    }

    #[pyo3(signature = (suite = "all", trials = DEFAULT_TRIALS, seed = 0))]
    fn verify<'py>(&self, py: Python<'py>, suite: &str, trials: u64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let suite: Suite = suite.parse().map_err(to_py_err)?;
        let doc = py.detach(|| lab::cmd_verify(&self.inner, suite, trials, seed)).map_err(to_py_err)?;
        to_py(py, &doc)
    }

    fn __repr__(&self) -> String {
        let base = self.inner.base();
        format!(
            "Lab(p={}, n={}, lower_breaks={:?}, precision={})",
            base.n.p(),
            base.n.n(),
            base.data.lower_breaks,
            base.precision()
        )
    }
}

/// Populate `m` with the module contents.
pub fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<PyLab>()?;
    m.add("NbvalError", py.get_type::<NbvalError>())?;
    m.add("InconclusiveError", py.get_type::<InconclusiveError>())?;
    m.add("StructuralError", py.get_type::<StructuralError>())?;
    m.add("InvalidInputError", py.get_type::<InvalidInputError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[pymodule]
fn pynbval(m: &Bound<'_, PyModule>) -> PyResult<()> {
    init(m)
}
