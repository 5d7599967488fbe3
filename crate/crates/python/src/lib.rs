//! Python bindings for the `quorumlab` crate.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use quorumlab::analysis::{DEFAULT_THRESHOLD_TOL, DEFAULT_TOLERANCE};
use quorumlab::{Criterion, QuorumError};

create_exception!(quorumlab_py, CriterionNotBracketed, PyValueError);

fn to_py(err: QuorumError) -> PyErr {
    match err {
        QuorumError::CriterionNotBracketed { .. } => {
            CriterionNotBracketed::new_err(err.to_string())
        }
        QuorumError::SimulationStuck(_) => PyRuntimeError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

#[pyclass(name = "Schedule", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PySchedule {
    inner: quorumlab::Schedule,
}

#[pymethods]
impl PySchedule {
    #[staticmethod]
    fn constant(p: f64) -> PyResult<Self> {
        quorumlab::Schedule::constant(p)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn harmonic() -> Self {
        Self {
            inner: quorumlab::Schedule::harmonic(),
        }
    }

    #[staticmethod]
    fn table(probs: Vec<f64>) -> PyResult<Self> {
        quorumlab::Schedule::table(probs)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// Parses `constant:p=<float>`, `harmonic` or `table:<p1>,<p2>,...`.
    #[staticmethod]
    fn parse(spec: &str) -> PyResult<Self> {
        quorumlab::parse_schedule(spec)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind_name()
    }

    fn up_probability(&self, n: usize) -> PyResult<f64> {
        self.inner.up_probability(n).map_err(to_py)
    }

    fn step_ratio(&self, k: usize) -> PyResult<f64> {
        self.inner.step_ratio(k).map_err(to_py)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Schedule.parse({:?})", self.inner.to_string())
    }
}

#[pyclass(name = "QuorumModel", frozen, from_py_object)]
#[derive(Clone)]
struct PyQuorumModel {
    inner: quorumlab::QuorumModel,
}

#[pymethods]
impl PyQuorumModel {
    #[new]
    fn new(schedule: PySchedule, rho: f64) -> PyResult<Self> {
        quorumlab::QuorumModel::new(schedule.inner, rho)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn schedule(&self) -> PySchedule {
        PySchedule {
            inner: self.inner.schedule().clone(),
        }
    }

    #[getter]
    fn rho(&self) -> f64 {
        self.inner.rho()
    }

    fn __repr__(&self) -> String {
        format!(
            "QuorumModel(Schedule.parse({:?}), rho={})",
            self.inner.schedule().to_string(),
            self.inner.rho()
        )
    }
}

#[pyclass(name = "MonotonicityReport", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyMonotonicityReport {
    class: String,
    argmax_n: usize,
    max_f: f64,
    window: (usize, usize),
    tolerance: f64,
}

#[pyclass(name = "ThresholdResult", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyThresholdResult {
    rho_star: f64,
    bracket: (f64, f64),
    criterion: String,
}

#[pyclass(name = "McEstimate", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct PyMcEstimate {
    mean: f64,
    stderr: f64,
    trials: u64,
    seed: u64,
    successes: u64,
    reached: u64,
}

#[pyfunction]
fn reach_probability(schedule: PySchedule, n: usize) -> PyResult<f64> {
    quorumlab::reach_probability(&schedule.inner, n).map_err(to_py)
}

#[pyfunction]
fn reach_probability_closed(schedule: PySchedule, n: usize) -> PyResult<f64> {
    quorumlab::reach_probability_closed(&schedule.inner, n).map_err(to_py)
}

#[pyfunction]
fn success_probability(model: PyQuorumModel, n: usize) -> PyResult<f64> {
    quorumlab::success_probability(&model.inner, n).map_err(to_py)
}

#[pyfunction]
fn success_probability_factored(model: PyQuorumModel, n: usize) -> PyResult<f64> {
    quorumlab::success_probability_factored(&model.inner, n).map_err(to_py)
}

/// List of `(N, reach, f)` for `N = 1..=n_max`.
#[pyfunction]
fn success_curve(model: PyQuorumModel, n_max: usize) -> PyResult<Vec<(usize, f64, f64)>> {
    let curve = quorumlab::success_curve(&model.inner, n_max).map_err(to_py)?;
    Ok(curve.iter().collect())
}

#[pyfunction]
#[pyo3(signature = (model, n_max, tolerance = DEFAULT_TOLERANCE))]
fn classify(model: PyQuorumModel, n_max: usize, tolerance: f64) -> PyResult<PyMonotonicityReport> {
    let rep = quorumlab::classify(&model.inner, n_max, tolerance).map_err(to_py)?;
    Ok(PyMonotonicityReport {
        class: rep.class.to_string(),
        argmax_n: rep.argmax_n,
        max_f: rep.max_f,
        window: rep.window,
        tolerance: rep.tolerance,
    })
}

#[pyfunction]
fn classify_constant_analytic(p: f64, rho: f64) -> PyResult<String> {
    quorumlab::classify_constant_analytic(p, rho)
        .map(|c| c.to_string())
        .map_err(to_py)
}

#[pyfunction]
fn optimal_quorum(model: PyQuorumModel, n_max: usize) -> PyResult<(usize, f64)> {
    quorumlab::optimal_quorum(&model.inner, n_max).map_err(to_py)
}

#[pyfunction]
fn critical_rho_constant(p: f64) -> PyResult<Option<f64>> {
    quorumlab::critical_rho_constant(p).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (schedule, n_max, criterion, tol = DEFAULT_THRESHOLD_TOL))]
fn threshold_scan(
    schedule: PySchedule,
    n_max: usize,
    criterion: &str,
    tol: f64,
) -> PyResult<PyThresholdResult> {
    let criterion: Criterion = criterion.parse().map_err(to_py)?;
    let res = quorumlab::threshold_scan(&schedule.inner, n_max, criterion, tol).map_err(to_py)?;
    Ok(PyThresholdResult {
        rho_star: res.rho_star,
        bracket: res.bracket,
        criterion: res.criterion.to_string(),
    })
}

#[pyfunction]
fn estimate_success(
    py: Python<'_>,
    model: PyQuorumModel,
    n: usize,
    trials: u64,
    seed: u64,
) -> PyResult<PyMcEstimate> {
    let est = py
        .detach(|| quorumlab::estimate_success(&model.inner, n, trials, seed))
        .map_err(to_py)?;
    Ok(PyMcEstimate {
        mean: est.mean,
        stderr: est.stderr,
        trials: est.trials,
        seed: est.seed,
        successes: est.successes,
        reached: est.reached,
    })
}

#[pymodule]
fn quorumlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySchedule>()?;
    m.add_class::<PyQuorumModel>()?;
    m.add_class::<PyMonotonicityReport>()?;
    m.add_class::<PyThresholdResult>()?;
    m.add_class::<PyMcEstimate>()?;
    m.add(
        "CriterionNotBracketed",
        m.py().get_type::<CriterionNotBracketed>(),
    )?;
    m.add_function(wrap_pyfunction!(reach_probability, m)?)?;
    m.add_function(wrap_pyfunction!(reach_probability_closed, m)?)?;
    m.add_function(wrap_pyfunction!(success_probability, m)?)?;
    m.add_function(wrap_pyfunction!(success_probability_factored, m)?)?;
    m.add_function(wrap_pyfunction!(success_curve, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(classify_constant_analytic, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_quorum, m)?)?;
    m.add_function(wrap_pyfunction!(critical_rho_constant, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_scan, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_success, m)?)?;
    Ok(())
}
