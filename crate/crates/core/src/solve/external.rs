//! External MILP solver adapter.
//!
//! The model is written in the LP interchange format to a temporary file
//! and a user-supplied shell command is run with `{model_file}` and
//! `{solution_file}` substituted.  The command must leave a solution file
//! of `name value` lines (variables not listed read as zero) and exit
//! zero on proven optimality; any nonzero exit is reported as a limit.
//! Solutions are rounded (tolerance 1e-6), then verified exactly against
//! every model row before being accepted.

use std::io::Write;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::{emit_lp, verify_solution, FlowModel};
use crate::solve::{BackendConfig, SolveReport, SolveStatus};

const INTEGRALITY_TOLERANCE: f64 = 1e-6;

pub fn solve_external(model: &FlowModel, config: &BackendConfig) -> Result<SolveReport> {
    let template = config
        .command_template
        .as_deref()
        .filter(|t| !t.trim().is_empty())
        .ok_or_else(|| {
            Error::Solver("external backend needs a non-empty command template".into())
        })?;
    let dir = tempfile::Builder::new().prefix("mvbp").tempdir()?;
    let model_path = dir.path().join("model.lp");
    let solution_path = dir.path().join("solution.sol");
    {
        let mut file = std::fs::File::create(&model_path)?;
        file.write_all(emit_lp(model).as_bytes())?;
    }
    let command = template
        .replace("{model_file}", &model_path.to_string_lossy())
        .replace("{solution_file}", &solution_path.to_string_lossy());

    let started = Instant::now();
    let mut child = std::process::Command::new("sh")
        .arg("-c")
        .arg(&command)
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .map_err(|e| Error::Solver(format!("failed to launch `{command}`: {e}")))?;
    let status = loop {
        match child.try_wait()? {
            Some(status) => break status,
            None => {
                if let Some(limit) = config.time_limit {
                    if started.elapsed() > limit {
                        let _ = child.kill();
                        let _ = child.wait();
                        return Ok(SolveReport::limit(format!(
                            "external solver killed after {limit:?}"
                        )));
                    }
                }
                std::thread::sleep(Duration::from_millis(10));
            }
        }
    };
    if !status.success() {
        let mut stderr = String::new();
        if let Some(mut pipe) = child.stderr.take() {
            use std::io::Read;
            let _ = pipe.read_to_string(&mut stderr);
        }
        let excerpt: String = stderr.chars().take(400).collect();
        return Ok(SolveReport::limit(format!(
            "external solver exited with {status}: {excerpt}"
        )));
    }

    let text = std::fs::read_to_string(&solution_path).map_err(|e| {
        Error::InvalidSolution(format!(
            "solver exited successfully but the solution file is unreadable: {e}"
        ))
    })?;
    let (flows, z) = parse_solution(model, &text)?;
    let objective = verify_solution(model, &flows, z)?;
    Ok(SolveReport {
        status: SolveStatus::Optimal,
        objective: Some(objective),
        flows,
        z,
        bb_nodes: 0,
        lp_bound: None,
        time_model: started.elapsed(),
        time_total: started.elapsed(),
        message: None,
    })
}

/// Parses `name value` lines; unlisted variables are zero.
pub fn parse_solution(model: &FlowModel, text: &str) -> Result<(Vec<u64>, u64)> {
    let names: std::collections::HashMap<String, usize> = (0..model.num_vars())
        .map(|v| (model.var_name(v), v))
        .collect();
    let mut flows = vec![0u64; model.num_arcs()];
    let mut z = 0u64;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (name, value, extra) = (parts.next(), parts.next(), parts.next());
        let (Some(name), Some(value), None) = (name, value, extra) else {
            return Err(Error::InvalidSolution(format!(
                "solution line {}: expected `name value`, got `{line}`",
                lineno + 1
            )));
        };
        let var = *names.get(name).ok_or_else(|| {
            Error::InvalidSolution(format!(
                "solution line {}: unknown variable `{name}`",
                lineno + 1
            ))
        })?;
        let raw: f64 = value.parse().map_err(|_| {
            Error::InvalidSolution(format!(
                "solution line {}: unparseable value `{value}`",
                lineno + 1
            ))
        })?;
        let rounded = raw.round();
        if (raw - rounded).abs() > INTEGRALITY_TOLERANCE || rounded < 0.0 {
            return Err(Error::InvalidSolution(format!(
                "solution line {}: `{name}` = {raw} is not a non-negative integer",
                lineno + 1
            )));
        }
        let int = rounded as u64;
        if var == model.z_var() {
            z = int;
        } else {
            flows[var] = int;
        }
    }
    Ok((flows, z))
}
