//! Solving the flow model to proven optimality.
//!
//! Three backends share one report shape: an external MILP solver driven
//! through a command template and a neutral solution-file format, a
//! built-in branch-and-bound over pattern multiplicities for desk-scale
//! instances, and an exhaustive assignment oracle used as ground truth in
//! tests.  Whatever the backend claims, solutions are re-verified in exact
//! integer arithmetic before being reported.

mod builtin;
mod external;
mod oracle;

pub use builtin::solve_builtin;
pub use external::solve_external;
pub use oracle::{solve_oracle, solve_oracle_bins, OracleBin, ORACLE_UNIT_LIMIT};

use std::time::Duration;

use crate::error::{Error, Result};
use crate::graph::ArcFlowGraph;
use crate::instance::{Cost, Instance};
use crate::model::FlowModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    External,
    Builtin,
    Oracle,
}

impl std::str::FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "external" => Ok(BackendKind::External),
            "builtin" => Ok(BackendKind::Builtin),
            "oracle" => Ok(BackendKind::Oracle),
            other => Err(Error::Solver(format!(
                "unknown backend `{other}` (expected external, builtin or oracle)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BackendConfig {
    pub kind: BackendKind,
    /// Shell command with `{model_file}` and `{solution_file}`
    /// placeholders; required for the external backend.
    pub command_template: Option<String>,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    /// Built-in backend: refuse bin types with more distinct patterns.
    pub pattern_cap: u64,
    /// Built-in backend: refuse bin types with more source-target paths.
    pub path_budget: u64,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            kind: BackendKind::Builtin,
            command_template: None,
            time_limit: None,
            node_limit: None,
            pattern_cap: 100_000,
            path_budget: 2_000_000,
        }
    }
}

impl BackendConfig {
    pub fn builtin() -> Self {
        BackendConfig::default()
    }

    pub fn oracle() -> Self {
        BackendConfig {
            kind: BackendKind::Oracle,
            ..BackendConfig::default()
        }
    }

    pub fn external(command_template: impl Into<String>) -> Self {
        BackendConfig {
            kind: BackendKind::External,
            command_template: Some(command_template.into()),
            ..BackendConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Limit,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Exact objective; present on optimal status.
    pub objective: Option<Cost>,
    /// Flow per arc variable; empty unless optimal.
    pub flows: Vec<u64>,
    pub z: u64,
    /// Branch-and-bound nodes explored beyond the root.
    pub bb_nodes: u64,
    /// Root linear relaxation value, when a relaxation was solved.
    pub lp_bound: Option<f64>,
    /// Time spent solving the model.
    pub time_model: Duration,
    /// Total pipeline time; backends set it to the solve time and the
    /// pipeline widens it.
    pub time_total: Duration,
    pub message: Option<String>,
}

impl SolveReport {
    pub fn limit(message: impl Into<String>) -> Self {
        SolveReport {
            status: SolveStatus::Limit,
            objective: None,
            flows: Vec::new(),
            z: 0,
            bb_nodes: 0,
            lp_bound: None,
            time_model: Duration::ZERO,
            time_total: Duration::ZERO,
            message: Some(message.into()),
        }
    }
}

/// Solves the model with the configured backend.  Timing of the solve call
/// is recorded in `time_model` (and mirrored in `time_total`).
pub fn solve(
    model: &FlowModel,
    graph: &ArcFlowGraph,
    instance: &Instance,
    config: &BackendConfig,
) -> Result<SolveReport> {
    let started = std::time::Instant::now();
    let mut report = match config.kind {
        BackendKind::Builtin => solve_builtin(model, graph, instance, config)?,
        BackendKind::External => solve_external(model, config)?,
        BackendKind::Oracle => oracle::solve_via_oracle(model, graph, instance)?,
    };
    report.time_model = started.elapsed();
    report.time_total = report.time_model;
    Ok(report)
}

/// Turns a per-bin pattern realization into arc flows: each bin follows its
/// witness path plus the two connectors of its type.
pub(crate) fn flows_from_paths(
    model: &FlowModel,
    graph: &ArcFlowGraph,
    bins: &[(u32, Vec<usize>, u64)],
) -> Result<(Vec<u64>, u64)> {
    let mut flows = vec![0u64; model.num_arcs()];
    let mut z = 0u64;
    let source = graph.source();
    let target = graph.target();
    for &(bin_type, ref witness, multiplicity) in bins {
        if multiplicity == 0 {
            continue;
        }
        z += multiplicity;
        let s_t = graph.type_source(bin_type)?;
        let t_t = graph.type_target(bin_type)?;
        let source_conn = graph
            .arcs()
            .iter()
            .position(|a| a.tail == source && a.head == s_t)
            .ok_or_else(|| Error::Solver(format!("no source connector for type {bin_type}")))?;
        let target_conn = graph
            .arcs()
            .iter()
            .position(|a| a.tail == t_t && a.head == target)
            .ok_or_else(|| Error::Solver(format!("no target connector for type {bin_type}")))?;
        flows[source_conn] += multiplicity;
        flows[target_conn] += multiplicity;
        for &arc_idx in witness {
            flows[arc_idx] += multiplicity;
        }
    }
    Ok((flows, z))
}
