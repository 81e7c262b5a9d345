//! The end-to-end solve: build per-type graphs, stitch, compress, assemble
//! the model, solve, extract and validate.  Used by the CLI, the benchmark
//! harness and the Python bindings.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::{build_type_graph, compress_final, stitch, ArcFlowGraph, GraphStats};
use crate::instance::Instance;
use crate::model::{assemble, default_j, FlowModel};
use crate::solution::{extract, validate, PackingSolution};
use crate::solve::{solve, BackendConfig, SolveReport, SolveStatus};

/// Everything the pipeline produced for one instance.
pub struct PipelineResult {
    pub graph: ArcFlowGraph,
    pub stats: GraphStats,
    pub model: FlowModel,
    pub report: SolveReport,
    pub solution: Option<PackingSolution>,
}

fn stage<T>(name: &str, result: Result<T>) -> Result<T> {
    result.map_err(|e| match e {
        Error::Io(io) => Error::Io(io),
        other => Error::Solver(format!("{name}: {other}")),
    })
}

/// Builds and compresses the stitched graph for an instance.
pub fn build_graph(instance: &Instance) -> Result<(ArcFlowGraph, GraphStats)> {
    let mut graphs = Vec::with_capacity(instance.num_bins());
    for t in 1..=instance.num_bins() as u32 {
        graphs.push(stage("build", build_type_graph(instance, t))?);
    }
    let stitched = stage("stitch", stitch(graphs))?;
    Ok(compress_final(&stitched, instance))
}

/// Full pipeline.  `time_total` on the report covers every stage from
/// graph construction through extraction; `time_model` only the solve.
pub fn run(instance: &Instance, config: &BackendConfig) -> Result<PipelineResult> {
    let started = Instant::now();
    let (graph, stats) = build_graph(instance)?;
    let j = default_j(instance);
    let model = stage("assemble", assemble(&graph, instance, &j))?;
    let mut report = stage("solve", solve(&model, &graph, instance, config))?;
    let solution = if report.status == SolveStatus::Optimal {
        let solution = stage("extract", extract(&graph, &report, instance))?;
        let verdict = validate(&solution, instance, &j);
        if !verdict.passed() {
            return Err(Error::Solver(format!(
                "validate: extracted solution is invalid: {}",
                verdict.violations.join("; ")
            )));
        }
        Some(solution)
    } else {
        None
    };
    report.time_total = started.elapsed();
    Ok(PipelineResult {
        graph,
        stats,
        model,
        report,
        solution,
    })
}
