//! Python bindings for `gateassign`.

use std::collections::HashMap;
use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use gateassign::{objective, schedule, solver};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_mode(mode: &str) -> PyResult<objective::ObjectiveMode> {
    mode.parse().map_err(value_err)
}

#[pyclass(name = "Flight", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyFlight {
    inner: schedule::Flight,
}

#[pymethods]
impl PyFlight {
    #[new]
    fn new(id: String, arrival: i64, departure: i64) -> PyResult<Self> {
        schedule::Flight::new(id, arrival, departure)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    #[getter]
    fn id(&self) -> &str {
        self.inner.id()
    }

    #[getter]
    fn arrival(&self) -> i64 {
        self.inner.arrival()
    }

    #[getter]
    fn departure(&self) -> i64 {
        self.inner.departure()
    }

    /// `(start, end)` of the closed locked interval under `buffer`.
    #[pyo3(signature = (buffer = solver::DEFAULT_BUFFER))]
    fn locked_interval(&self, buffer: i64) -> (i64, i64) {
        let iv = self.inner.locked_interval(buffer);
        (iv.start, iv.end)
    }

    fn __repr__(&self) -> String {
        format!(
            "Flight({:?}, {}, {})",
            self.inner.id(),
            self.inner.arrival(),
            self.inner.departure()
        )
    }
}

#[pyclass(name = "Schedule", frozen, from_py_object)]
#[derive(Clone)]
pub struct PySchedule {
    inner: schedule::Schedule,
}

#[pymethods]
impl PySchedule {
    #[new]
    fn new(flights: Vec<PyFlight>) -> PyResult<Self> {
        schedule::Schedule::new(flights.into_iter().map(|f| f.inner).collect())
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        schedule::parse_schedule(text)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    #[pyo3(signature = (count, day_start = 360, day_end = 1439, stay = 60, seed = 0))]
    fn generate(
        count: usize,
        day_start: i64,
        day_end: i64,
        stay: i64,
        seed: u64,
    ) -> PyResult<Self> {
        schedule::generate_schedule(count, day_start, day_end, stay, seed)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    #[getter]
    fn flights(&self) -> Vec<PyFlight> {
        self.inner
            .flights()
            .iter()
            .map(|f| PyFlight { inner: f.clone() })
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn scatter_csv(&self) -> String {
        schedule::scatter_export(&self.inner)
    }

    #[pyo3(signature = (buffer = solver::DEFAULT_BUFFER))]
    fn min_gates_required(&self, buffer: i64) -> usize {
        schedule::min_gates_required(&self.inner, buffer)
    }
}

#[pyclass(name = "CostReport", frozen)]
pub struct PyCostReport {
    inner: objective::CostReport,
}

#[pymethods]
impl PyCostReport {
    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode.as_str()
    }

    #[getter]
    fn total(&self) -> f64 {
        self.inner.total
    }

    #[getter]
    fn feasible(&self) -> bool {
        self.inner.feasible
    }

    #[getter]
    fn conflicts(&self) -> usize {
        self.inner.conflict_count
    }

    /// `(earlier, later, gate, gap, value)` tuples.
    #[getter]
    fn terms(&self) -> Vec<(String, String, usize, i64, f64)> {
        self.inner
            .terms
            .iter()
            .map(|t| (t.earlier.clone(), t.later.clone(), t.gate, t.gap, t.value))
            .collect()
    }

    /// `(first, second, gate)` tuples of overlapping same-gate pairs.
    #[getter]
    fn violations(&self) -> Vec<(String, String, usize)> {
        self.inner
            .violations
            .iter()
            .map(|v| (v.first.clone(), v.second.clone(), v.gate))
            .collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }
}

#[pyclass(name = "SolveResult", frozen)]
pub struct PySolveResult {
    outcome: solver::SolveOutcome,
    schedule: schedule::Schedule,
}

#[pymethods]
impl PySolveResult {
    #[getter]
    fn status(&self) -> &'static str {
        self.outcome.status.as_str()
    }

    #[getter]
    fn objective(&self) -> Option<f64> {
        self.outcome.objective()
    }

    /// Flight id -> gate, or `None` when no assignment was found.
    #[getter]
    fn assignment(&self) -> Option<HashMap<String, usize>> {
        self.outcome.assignment.as_ref().map(|a| {
            self.schedule
                .flights()
                .iter()
                .zip(a.gates())
                .map(|(f, &g)| (f.id().to_string(), g))
                .collect()
        })
    }

    #[getter]
    fn nodes(&self) -> u64 {
        self.outcome.nodes_explored
    }

    #[getter]
    fn elapsed_s(&self) -> f64 {
        self.outcome.elapsed.as_secs_f64()
    }

    #[pyo3(signature = (timing = true))]
    fn to_json(&self, timing: bool) -> String {
        self.outcome.to_json(&self.schedule, timing)
    }
}

fn build_config(
    gates: usize,
    buffer: i64,
    mode: &str,
    time_limit: Option<f64>,
    seed: u64,
) -> PyResult<solver::SolveConfig> {
    let mut cfg = solver::SolveConfig::new(gates)
        .with_buffer(buffer)
        .with_mode(parse_mode(mode)?)
        .with_seed(seed);
    if let Some(secs) = time_limit {
        cfg.time_limit = Some(Duration::try_from_secs_f64(secs).map_err(value_err)?);
    }
    Ok(cfg)
}

#[pyfunction]
fn parse_schedule(text: &str) -> PyResult<PySchedule> {
    PySchedule::parse(text)
}

#[pyfunction]
#[pyo3(signature = (count, day_start = 360, day_end = 1439, stay = 60, seed = 0))]
fn generate_schedule(
    count: usize,
    day_start: i64,
    day_end: i64,
    stay: i64,
    seed: u64,
) -> PyResult<PySchedule> {
    PySchedule::generate(count, day_start, day_end, stay, seed)
}

#[pyfunction]
#[pyo3(signature = (f, g, buffer = solver::DEFAULT_BUFFER))]
fn overlaps(f: &PyFlight, g: &PyFlight, buffer: i64) -> bool {
    schedule::overlaps(&f.inner, &g.inner, buffer)
}

#[pyfunction]
#[pyo3(signature = (schedule, buffer = solver::DEFAULT_BUFFER))]
fn min_gates_required(schedule: &PySchedule, buffer: i64) -> usize {
    schedule.min_gates_required(buffer)
}

#[pyfunction]
fn expected_conflict_probability(d_earlier: i64, a_later: i64, buffer: i64) -> PyResult<f64> {
    objective::expected_conflict_probability(d_earlier, a_later, buffer).map_err(value_err)
}

/// Scores a `{flight_id: gate}` assignment. Overlaps are reported, not
/// raised, in either mode.
#[pyfunction]
#[pyo3(signature = (schedule, assignment, buffer = solver::DEFAULT_BUFFER, mode = "adjacent", gate_count = None))]
fn evaluate(
    schedule: &PySchedule,
    assignment: HashMap<String, usize>,
    buffer: i64,
    mode: &str,
    gate_count: Option<usize>,
) -> PyResult<PyCostReport> {
    let count = gate_count.unwrap_or_else(|| assignment.values().map(|g| g + 1).max().unwrap_or(1));
    let asg = objective::Assignment::from_pairs(
        &schedule.inner,
        assignment.iter().map(|(f, &g)| (f.as_str(), g)),
        count,
    )
    .map_err(value_err)?;
    objective::evaluate(&schedule.inner, &asg, buffer, parse_mode(mode)?)
        .map(|inner| PyCostReport { inner })
        .map_err(value_err)
}

/// Runs an engine: `exact`, `greedy`, `greedy+local` or `brute`.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (schedule, gates, buffer = solver::DEFAULT_BUFFER, mode = "adjacent", engine = "exact", time_limit = None, seed = 0))]
fn solve(
    py: Python<'_>,
    schedule: &PySchedule,
    gates: usize,
    buffer: i64,
    mode: &str,
    engine: &str,
    time_limit: Option<f64>,
    seed: u64,
) -> PyResult<PySolveResult> {
    let cfg = build_config(gates, buffer, mode, time_limit, seed)?;
    let engine: solver::Engine = engine.parse().map_err(value_err)?;
    let sched = schedule.inner.clone();
    let outcome = py
        .detach(|| solver::solve(&sched, &cfg, engine))
        .map_err(value_err)?;
    Ok(PySolveResult {
        outcome,
        schedule: sched,
    })
}

type SweepTuple = (usize, &'static str, Option<f64>, f64);

/// `(gates, status, objective, runtime_s)` per gate count.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (schedule, gates_from, gates_to, buffer = solver::DEFAULT_BUFFER, mode = "adjacent", engine = "exact", time_limit = None))]
fn sweep_gates(
    py: Python<'_>,
    schedule: &PySchedule,
    gates_from: usize,
    gates_to: usize,
    buffer: i64,
    mode: &str,
    engine: &str,
    time_limit: Option<f64>,
) -> PyResult<Vec<SweepTuple>> {
    let cfg = build_config(gates_from.max(1), buffer, mode, time_limit, 0)?;
    let engine: solver::Engine = engine.parse().map_err(value_err)?;
    let rows = py
        .detach(|| solver::sweep_gates(&schedule.inner, gates_from, gates_to, &cfg, engine))
        .map_err(value_err)?;
    Ok(rows
        .into_iter()
        .map(|r| {
            (
                r.gates,
                r.status.as_str(),
                r.objective,
                r.runtime.as_secs_f64(),
            )
        })
        .collect())
}

#[pymodule]
fn pygateassign(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFlight>()?;
    m.add_class::<PySchedule>()?;
    m.add_class::<PyCostReport>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(parse_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(generate_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(overlaps, m)?)?;
    m.add_function(wrap_pyfunction!(min_gates_required, m)?)?;
    m.add_function(wrap_pyfunction!(expected_conflict_probability, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_gates, m)?)?;
    m.add("DEFAULT_BUFFER", solver::DEFAULT_BUFFER)?;
    Ok(())
}
