//! Python bindings: the LP layer plus the high-level planning pipeline.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any().unbind()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(value).map_err(err)?;
    json_to_py(py, &v)
}

/// Sparse LP with bounded columns; solve with the built-in simplex or
/// export as MPS.
#[pyclass]
struct LpModel {
    inner: gridx::lp::LpModel,
}

#[pymethods]
impl LpModel {
    #[new]
    fn new() -> Self {
        LpModel { inner: gridx::lp::LpModel::new() }
    }

    /// Add a column; infinite bounds accepted. Returns the column index.
    fn add_col(&mut self, name: &str, lower: f64, upper: f64, objective: f64) -> usize {
        self.inner.add_col(name, lower, upper, objective)
    }

    /// Add a row with sense "<=", ">=", or "=". Returns the row index.
    fn add_row(&mut self, name: &str, sense: &str, rhs: f64) -> PyResult<usize> {
        let sense = match sense {
            "<=" | "le" | "L" => gridx::lp::Sense::Le,
            ">=" | "ge" | "G" => gridx::lp::Sense::Ge,
            "=" | "==" | "eq" | "E" => gridx::lp::Sense::Eq,
            other => return Err(PyValueError::new_err(format!("bad sense {other:?}"))),
        };
        Ok(self.inner.add_row(name, sense, rhs))
    }

    fn add_coeff(&mut self, row: usize, col: usize, value: f64) {
        self.inner.add_coeff(row, col, value);
    }

    fn finalize(&mut self) -> PyResult<()> {
        self.inner.finalize().map_err(err)
    }

    fn solve(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let sol = gridx::lp::solve(&self.inner, &gridx::lp::SolveOptions::default())
            .map_err(err)?;
        let dict = PyDict::new(py);
        dict.set_item("status", format!("{:?}", sol.status))?;
        dict.set_item("objective", sol.objective)?;
        dict.set_item("primal", sol.primal)?;
        dict.set_item("iterations", sol.iterations)?;
        Ok(dict.into_any().unbind())
    }

    fn to_mps(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        gridx::lp::write_mps(&self.inner, &mut buf).map_err(err)?;
        String::from_utf8(buf).map_err(err)
    }

    #[getter]
    fn n_cols(&self) -> usize {
        self.inner.n_cols()
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }
}

/// Great-circle distance between two lat/lon points, miles.
#[pyfunction]
fn haversine_miles(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    gridx::spatial::haversine_miles(lat1, lon1, lat2, lon2)
}

/// Write the self-consistent demo input set into `dir`.
#[pyfunction]
fn write_demo_inputs(dir: PathBuf) -> PyResult<()> {
    gridx::synth::write_demo_inputs(&dir).map_err(err)
}

/// Annual demand trajectory for a scenario, as a dict of yearly series.
#[pyfunction]
fn demand_summary(py: Python<'_>, scenario: PathBuf, data: PathBuf) -> PyResult<Py<PyAny>> {
    let prepared = gridx::pipeline::prepare(&scenario, &data).map_err(err)?;
    to_py(py, &prepared.demand_summary())
}

/// Full pipeline (cluster, demand, build, solve, report); returns the
/// solution summary as nested dicts.
#[pyfunction]
fn run(py: Python<'_>, scenario: PathBuf, data: PathBuf) -> PyResult<Py<PyAny>> {
    let (prepared, output) = gridx::pipeline::run(&scenario, &data).map_err(err)?;
    let file = gridx::pipeline::solution_file(&prepared, &output).map_err(err)?;
    to_py(py, &file)
}

/// Re-solve while varying one technology's construction time; returns a
/// list of per-point dicts.
#[pyfunction]
fn sweep_construction_time(
    py: Python<'_>,
    scenario: PathBuf,
    data: PathBuf,
    tech: &str,
    omegas: Vec<u32>,
) -> PyResult<Py<PyAny>> {
    let tech = gridx::domain::TechKind::parse(tech)
        .ok_or_else(|| PyValueError::new_err(format!("unknown technology {tech:?}")))?;
    let prepared = gridx::pipeline::prepare(&scenario, &data).map_err(err)?;
    let rows = gridx::pipeline::sweep_construction_time(&prepared, tech, &omegas);
    to_py(py, &rows)
}

/// Representative-day clustering of a full year of profiles.
#[pyfunction]
#[pyo3(signature = (load, cf_solar, cf_wind, k, seed=17, restarts=4, profile="mean"))]
#[allow(clippy::too_many_arguments)]
fn cluster_days(
    py: Python<'_>,
    load: Vec<Vec<f64>>,
    cf_solar: Vec<Vec<f64>>,
    cf_wind: Vec<Vec<f64>>,
    k: usize,
    seed: u64,
    restarts: usize,
    profile: &str,
) -> PyResult<Py<PyAny>> {
    let wrap = |m: Vec<Vec<f64>>| gridx::ingest::ProfileMatrix {
        bus_ids: (0..m.len()).collect(),
        values: m,
    };
    let result = gridx::cluster::cluster_days(
        &wrap(load),
        &wrap(cf_solar),
        &wrap(cf_wind),
        k,
        seed,
        restarts,
        profile,
    )
    .map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("days", to_py(py, &result.days)?)?;
    dict.set_item("inertia", result.diagnostics.inertia)?;
    dict.set_item("silhouette", result.diagnostics.silhouette)?;
    Ok(dict.into_any().unbind())
}

/// Reference load-growth trajectory used by the bundled scenario.
#[pyfunction]
fn load_growth_scenario(py: Python<'_>) -> PyResult<Py<PyAny>> {
    let (horizon, demand) = gridx::synth::load_growth_scenario();
    let dict = PyDict::new(py);
    dict.set_item("horizon", horizon)?;
    dict.set_item("demand", to_py(py, &demand)?)?;
    Ok(dict.into_any().unbind())
}

#[pymodule]
fn gridx_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<LpModel>()?;
    m.add_function(wrap_pyfunction!(haversine_miles, m)?)?;
    m.add_function(wrap_pyfunction!(write_demo_inputs, m)?)?;
    m.add_function(wrap_pyfunction!(demand_summary, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_construction_time, m)?)?;
    m.add_function(wrap_pyfunction!(cluster_days, m)?)?;
    m.add_function(wrap_pyfunction!(load_growth_scenario, m)?)?;
    Ok(())
}
