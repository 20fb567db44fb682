//! Python bindings. Results come back as plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use windowgap::asymptotics::sweep as run_sweep;
use windowgap::fd::{fd_ground_state as run_fd, GridSpec};
use windowgap::modematch::DEFAULT_MAX_MODES;
use windowgap::{ErrorClass, SolveOutcome, TransverseMode};

fn py_err(e: windowgap::Error) -> PyErr {
    match e.class() {
        ErrorClass::Validation => PyValueError::new_err(e.to_string()),
        ErrorClass::Numerical => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any().unbind(),
            (None, Some(f)) => f.into_pyobject(py)?.into_any().unbind(),
            _ => py.None(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn dict<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// Two strips of widths `d1` (top) and `d2` (bottom) joined through a
/// window of half-width `a`. `d2 = 0` is the half-strip problem.
#[pyclass(name = "Geometry", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyGeometry(windowgap::Geometry);

#[pymethods]
impl PyGeometry {
    #[new]
    #[pyo3(signature = (d1, d2, a))]
    fn new(d1: f64, d2: f64, a: f64) -> PyResult<Self> {
        windowgap::Geometry::new(d1, d2, a).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn half_strip(d: f64, a: f64) -> PyResult<Self> {
        windowgap::Geometry::half_strip(d, a).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn symmetric_pair(d: f64, a: f64) -> PyResult<Self> {
        windowgap::Geometry::symmetric_pair(d, a).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn from_config(path: &str) -> PyResult<Self> {
        windowgap::Geometry::from_config_file(path).map(Self).map_err(py_err)
    }

    fn with_window(&self, a: f64) -> PyResult<Self> {
        self.0.with_window(a).map(Self).map_err(py_err)
    }

    #[getter]
    fn d1(&self) -> f64 {
        self.0.d1()
    }

    #[getter]
    fn d2(&self) -> f64 {
        self.0.d2()
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a()
    }

    #[getter]
    fn threshold(&self) -> f64 {
        self.0.threshold()
    }

    fn __repr__(&self) -> String {
        format!("Geometry(d1={}, d2={}, a={})", self.0.d1(), self.0.d2(), self.0.a())
    }
}

/// Ground state by mode matching. Returns a dict with `E`, `gap`, `n_modes`,
/// `residual` and the coefficient vectors, or `None` when no level was
/// resolved below the threshold.
#[pyfunction]
#[pyo3(signature = (geometry, tol=1e-8, n_max=DEFAULT_MAX_MODES))]
fn solve_ground_state(py: Python<'_>, geometry: PyGeometry, tol: f64, n_max: usize) -> PyResult<Py<PyAny>> {
    let out = py.detach(|| windowgap::solve_ground_state(&geometry.0, tol, n_max)).map_err(py_err)?;
    match out {
        SolveOutcome::Bound(r) => {
            let v = dict(py, &r)?;
            let d = v.bind(py).cast::<PyDict>()?;
            d.set_item("E", r.energy)?;
            d.del_item("energy")?;
            Ok(v)
        }
        SolveOutcome::Unresolved(_) => Ok(py.None()),
    }
}

#[pyfunction]
fn optimize_trial(py: Python<'_>, geometry: PyGeometry) -> PyResult<Py<PyAny>> {
    let b = py.detach(|| windowgap::optimize_trial(&geometry.0)).map_err(py_err)?;
    dict(py, &b)
}

#[pyfunction]
#[pyo3(signature = (d, a_max))]
fn build_chain(py: Python<'_>, d: f64, a_max: f64) -> PyResult<Py<PyAny>> {
    dict(py, &windowgap::build_chain(d, a_max).map_err(py_err)?)
}

#[pyfunction]
fn gamma_constant(d: f64) -> PyResult<f64> {
    windowgap::gamma_constant(d).map_err(py_err)
}

/// Overlap of the first outer-strip mode `sin(pi y / d)` on `[0, d]` with the
/// first window mode `cos(pi y / 2a)` on `[0, a]`.
#[pyfunction]
#[pyo3(signature = (d, a, outer_index=1, inner_index=1))]
fn overlap(d: f64, a: f64, outer_index: usize, inner_index: usize) -> PyResult<f64> {
    windowgap::overlap(
        &TransverseMode::outer(outer_index, 0.0, d),
        &TransverseMode::neumann_dirichlet(inner_index, a),
    )
    .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (geometry, h, x_extent=6.0))]
fn fd_ground_state(py: Python<'_>, geometry: PyGeometry, h: f64, x_extent: f64) -> PyResult<Py<PyAny>> {
    let spec = GridSpec::new(geometry.0, h, x_extent).map_err(py_err)?;
    let r = py.detach(|| run_fd(&spec)).map_err(py_err)?;
    dict(py, &r)
}

/// Gap over a list of windows; returns `{"rows": [...], "fit": {...} | None}`.
#[pyfunction]
#[pyo3(signature = (geometry, a_values, tol=1e-6, n_max=DEFAULT_MAX_MODES, threads=0))]
fn sweep(
    py: Python<'_>,
    geometry: PyGeometry,
    a_values: Vec<f64>,
    tol: f64,
    n_max: usize,
    threads: usize,
) -> PyResult<Py<PyAny>> {
    let s = py.detach(|| run_sweep(&geometry.0, &a_values, tol, n_max, threads)).map_err(py_err)?;
    dict(py, &s)
}

#[pyfunction]
#[pyo3(signature = (d=1.0, n=512))]
fn lemma3_gap(py: Python<'_>, d: f64, n: usize) -> PyResult<Py<PyAny>> {
    dict(py, &py.detach(|| windowgap::lemma3_gap(d, n)).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (m, d, a, n=1024))]
fn lemma4_constant(py: Python<'_>, m: f64, d: f64, a: f64, n: usize) -> PyResult<Py<PyAny>> {
    dict(py, &py.detach(|| windowgap::lemma4_constant(m, d, a, n)).map_err(py_err)?)
}

#[pymodule]
#[pyo3(name = "windowgap")]
fn windowgap_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGeometry>()?;
    m.add_function(wrap_pyfunction!(solve_ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_trial, m)?)?;
    m.add_function(wrap_pyfunction!(build_chain, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_constant, m)?)?;
    m.add_function(wrap_pyfunction!(overlap, m)?)?;
    m.add_function(wrap_pyfunction!(fd_ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(lemma3_gap, m)?)?;
    m.add_function(wrap_pyfunction!(lemma4_constant, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
