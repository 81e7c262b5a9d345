//! Python bindings: instances, the solve pipeline and graph statistics.
//!
//! Usage from Python:
//!
//!     import mvbp
//!     inst = mvbp.Instance.parse(open("instance.txt").read())
//!     sol = mvbp.solve(inst)
//!     print(sol.cost, sol.bins)

use std::time::Duration;

use num_traits::ToPrimitive;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use mvbp_core::graph::{export_dot, export_json};
use mvbp_core::instance::{
    cost_to_string, generate_instance, parse_instance, render_instance, BinClass, RangeClass,
};
use mvbp_core::model::{assemble, default_j, emit_lp};
use mvbp_core::pipeline;
use mvbp_core::solution::{render_json, render_text};
use mvbp_core::solve::{BackendConfig, BackendKind, SolveStatus};
use mvbp_core::Error;

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::Syntax { .. }
        | Error::InvalidInstance(_)
        | Error::Infeasible(_)
        | Error::CapExceeded(_) => PyValueError::new_err(err.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// A multiple-choice vector bin packing instance.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Instance {
    inner: mvbp_core::instance::Instance,
}

#[pymethods]
impl Instance {
    /// Parse the native or classical VBP text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_instance(text)
            .map(|inner| Instance { inner })
            .map_err(to_py_err)
    }

    /// Read and parse an instance file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PyValueError::new_err(format!("{path}: {e}")))?;
        Instance::parse(&text)
    }

    /// Generate a benchmark instance.
    ///
    /// Args:
    ///     range_class: weight range, 1, 2 or 3.
    ///     bin_types: number of bin types, 3 or 5.
    ///     n: number of items.
    ///     seed: generator seed.
    #[staticmethod]
    #[pyo3(signature = (range_class, bin_types, n, seed=1))]
    fn generate(range_class: u32, bin_types: u32, n: u64, seed: u64) -> PyResult<Self> {
        let range = RangeClass::from_index(range_class).map_err(to_py_err)?;
        let bins = BinClass::from_count(bin_types).map_err(to_py_err)?;
        generate_instance(range, bins, n, seed)
            .map(|inner| Instance { inner })
            .map_err(to_py_err)
    }

    #[getter]
    fn dims(&self) -> usize {
        self.inner.num_dims()
    }

    #[getter]
    fn num_items(&self) -> usize {
        self.inner.num_items()
    }

    #[getter]
    fn num_bin_types(&self) -> usize {
        self.inner.num_bins()
    }

    #[getter]
    fn total_items(&self) -> u64 {
        self.inner.total_items()
    }

    /// Canonical text rendering; parses back to an equal instance.
    fn render(&self) -> String {
        render_instance(&self.inner)
    }

    fn fingerprint(&self) -> String {
        self.inner.fingerprint()
    }

    /// The flow model in LP interchange format.
    fn lp_model(&self) -> PyResult<String> {
        let (graph, _) = pipeline::build_graph(&self.inner).map_err(to_py_err)?;
        let model =
            assemble(&graph, &self.inner, &default_j(&self.inner)).map_err(to_py_err)?;
        Ok(emit_lp(&model))
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(dims={}, items={}, bin_types={}, units={})",
            self.inner.num_dims(),
            self.inner.num_items(),
            self.inner.num_bins(),
            self.inner.total_items()
        )
    }
}

/// Vertex and arc counts of the compressed graph plus the share removed by
/// the final compression step.
#[pyclass]
struct GraphStats {
    #[pyo3(get)]
    vertices: usize,
    #[pyo3(get)]
    arcs: usize,
    #[pyo3(get)]
    pct_vertices_removed: f64,
    #[pyo3(get)]
    pct_arcs_removed: f64,
}

#[pymethods]
impl GraphStats {
    fn __repr__(&self) -> String {
        format!(
            "GraphStats(vertices={}, arcs={}, pct_vertices_removed={:.2}, pct_arcs_removed={:.2})",
            self.vertices, self.arcs, self.pct_vertices_removed, self.pct_arcs_removed
        )
    }
}

/// An optimal packing.
#[pyclass]
struct Solution {
    #[pyo3(get)]
    cost: f64,
    /// Exact cost as `num` or `num/den`.
    #[pyo3(get)]
    cost_exact: String,
    /// One (bin_type, [(item, incarnation), ...]) pair per bin.
    #[pyo3(get)]
    bins: Vec<(u32, Vec<(u32, u32)>)>,
    #[pyo3(get)]
    bb_nodes: u64,
    #[pyo3(get)]
    solve_seconds: f64,
    #[pyo3(get)]
    total_seconds: f64,
    text: String,
    json: String,
}

#[pymethods]
impl Solution {
    /// One line per bin: `t: (i,j) ...`.
    fn text(&self) -> String {
        self.text.clone()
    }

    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        format!("Solution(cost={}, bins={})", self.cost_exact, self.bins.len())
    }
}

/// Solve an instance to proven optimality.
///
/// Args:
///     instance: the instance to solve.
///     backend: "builtin", "external" or "oracle"; defaults to external
///         when solver_cmd is given, builtin otherwise.
///     solver_cmd: external command with {model_file} and {solution_file}
///         placeholders.
///     time_limit: wall-clock limit in seconds.
#[pyfunction]
#[pyo3(signature = (instance, backend=None, solver_cmd=None, time_limit=None))]
fn solve(
    instance: &Instance,
    backend: Option<&str>,
    solver_cmd: Option<String>,
    time_limit: Option<f64>,
) -> PyResult<Solution> {
    let kind = match backend {
        Some(name) => name.parse::<BackendKind>().map_err(to_py_err)?,
        None if solver_cmd.is_some() => BackendKind::External,
        None => BackendKind::Builtin,
    };
    let config = BackendConfig {
        kind,
        command_template: solver_cmd,
        time_limit: time_limit.map(Duration::from_secs_f64),
        ..BackendConfig::default()
    };
    let result = pipeline::run(&instance.inner, &config).map_err(to_py_err)?;
    match result.report.status {
        SolveStatus::Optimal => {
            let solution = result.solution.expect("optimal result has a solution");
            Ok(Solution {
                cost: solution.total_cost.to_f64().unwrap_or(f64::NAN),
                cost_exact: cost_to_string(&solution.total_cost),
                bins: solution
                    .bins
                    .iter()
                    .map(|b| (b.bin_type, b.contents.clone()))
                    .collect(),
                bb_nodes: result.report.bb_nodes,
                solve_seconds: result.report.time_model.as_secs_f64(),
                total_seconds: result.report.time_total.as_secs_f64(),
                text: render_text(&solution),
                json: render_json(&solution),
            })
        }
        SolveStatus::Infeasible => Err(PyValueError::new_err(format!(
            "infeasible: {}",
            result.report.message.unwrap_or_default()
        ))),
        SolveStatus::Limit => Err(PyRuntimeError::new_err(format!(
            "limit: {}",
            result.report.message.unwrap_or_default()
        ))),
    }
}

/// Build and compress the graph, returning its statistics.
#[pyfunction]
fn graph_stats(instance: &Instance) -> PyResult<GraphStats> {
    let (_, stats) = pipeline::build_graph(&instance.inner).map_err(to_py_err)?;
    Ok(GraphStats {
        vertices: stats.num_vertices,
        arcs: stats.num_arcs,
        pct_vertices_removed: stats.pct_vertices_removed,
        pct_arcs_removed: stats.pct_arcs_removed,
    })
}

/// The compressed graph in DOT format.
#[pyfunction]
fn graph_dot(instance: &Instance) -> PyResult<String> {
    let (graph, _) = pipeline::build_graph(&instance.inner).map_err(to_py_err)?;
    Ok(export_dot(&graph))
}

/// The compressed graph as JSON.
#[pyfunction]
fn graph_json(instance: &Instance) -> PyResult<String> {
    let (graph, _) = pipeline::build_graph(&instance.inner).map_err(to_py_err)?;
    Ok(export_json(&graph))
}

#[pymodule]
fn mvbp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Instance>()?;
    m.add_class::<Solution>()?;
    m.add_class::<GraphStats>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(graph_stats, m)?)?;
    m.add_function(wrap_pyfunction!(graph_dot, m)?)?;
    m.add_function(wrap_pyfunction!(graph_json, m)?)?;
    Ok(())
}
