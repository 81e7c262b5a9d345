//! Built-in exact branch-and-bound over pattern multiplicities.
//!
//! Patterns are enumerated per bin type from the graph (with caps; larger
//! instances belong to the external backend).  The search minimizes the
//! total bin cost of an exact cover of the demands: over-covering never
//! beats an optimum because any surplus unit can be dropped and the
//! thinned pattern is in the set too, so the optimum matches the flow
//! model for any equality set.  Nodes are bounded by the linear relaxation
//! and by a volume bound (best single-dimension capacity-per-cost over the
//! residual demand); branching fixes the most-loaded fractional pattern.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::{enumerate_patterns_with_witness, ArcFlowGraph};
use crate::instance::{Cost, Instance};
use crate::model::{verify_solution, FlowModel};
use crate::solve::{flows_from_paths, BackendConfig, SolveReport, SolveStatus};

struct Column {
    bin_type: u32,
    /// (item, units) with items ascending.
    counts: Vec<(u32, u32)>,
    cost: Cost,
    cost_f64: f64,
    witness: Vec<usize>,
    /// Largest multiplicity an exact cover can use.
    upper: u64,
}

fn build_columns(
    graph: &ArcFlowGraph,
    instance: &Instance,
    config: &BackendConfig,
) -> Result<Vec<Column>> {
    let mut columns: Vec<Column> = Vec::new();
    for &t in graph.bin_types() {
        let patterns =
            enumerate_patterns_with_witness(graph, t, config.path_budget, config.pattern_cap)?;
        let cost = instance.bin(t).cost.clone();
        let cost_f64 = cost.to_f64().unwrap_or(f64::MAX);
        for (pattern, witness) in patterns {
            if pattern.is_empty() {
                continue;
            }
            let mut counts: Vec<(u32, u32)> = Vec::new();
            for item in pattern {
                match counts.last_mut() {
                    Some((i, c)) if *i == item => *c += 1,
                    _ => counts.push((item, 1)),
                }
            }
            let upper = counts
                .iter()
                .map(|&(item, c)| instance.item(item).demand / c as u64)
                .min()
                .unwrap_or(0);
            if upper == 0 {
                continue;
            }
            columns.push(Column {
                bin_type: t,
                counts,
                cost: cost.clone(),
                cost_f64,
                witness,
                upper,
            });
        }
    }
    // Identical item counts: keep the cheapest realization.
    columns.sort_by(|a, b| {
        a.counts
            .cmp(&b.counts)
            .then_with(|| a.cost.cmp(&b.cost))
            .then(a.bin_type.cmp(&b.bin_type))
    });
    columns.dedup_by(|next, kept| kept.counts == next.counts);
    Ok(columns)
}

/// Cost floor for covering `residual` demand: in the best dimension, the
/// leftover volume divided by the best capacity-per-cost among bin types.
fn volume_bound(instance: &Instance, residual: &[u64]) -> Cost {
    let mut bound = Cost::zero();
    for d in 0..instance.dims {
        let best_value = instance
            .bins
            .iter()
            .map(|bin| Ratio::from_integer(bin.capacity[d] as i64) / bin.cost.clone())
            .max()
            .unwrap_or_else(Ratio::zero);
        if best_value.is_zero() {
            continue;
        }
        let volume: u64 = instance
            .items
            .iter()
            .map(|item| {
                let min_w = item
                    .incarnations
                    .iter()
                    .map(|inc| inc.weight[d] as u64)
                    .min()
                    .unwrap();
                residual[(item.index - 1) as usize] * min_w
            })
            .sum();
        let dim_bound = Ratio::from_integer(volume as i64) / best_value;
        if dim_bound > bound {
            bound = dim_bound;
        }
    }
    bound
}

struct Node {
    lower: Vec<u64>,
    upper: Vec<u64>,
}

pub fn solve_builtin(
    model: &FlowModel,
    graph: &ArcFlowGraph,
    instance: &Instance,
    config: &BackendConfig,
) -> Result<SolveReport> {
    let started = std::time::Instant::now();
    if instance.num_items() == 0 {
        let flows = vec![0u64; model.num_arcs()];
        let objective = verify_solution(model, &flows, 0)?;
        return Ok(SolveReport {
            status: SolveStatus::Optimal,
            objective: Some(objective),
            flows,
            z: 0,
            bb_nodes: 0,
            lp_bound: Some(0.0),
            time_model: started.elapsed(),
            time_total: started.elapsed(),
            message: None,
        });
    }
    let columns = match build_columns(graph, instance, config) {
        Ok(columns) => columns,
        Err(Error::CapExceeded(msg)) => {
            return Ok(SolveReport::limit(format!(
                "{msg}; use the external backend for instances of this size"
            )));
        }
        Err(other) => return Err(other),
    };
    let demands: Vec<u64> = instance.items.iter().map(|it| it.demand).collect();

    let solve_lp = |node: &Node| -> std::result::Result<(f64, Vec<f64>), minilp::Error> {
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<minilp::Variable> = columns
            .iter()
            .enumerate()
            .map(|(j, col)| {
                problem.add_var(col.cost_f64, (node.lower[j] as f64, node.upper[j] as f64))
            })
            .collect();
        for (pos, &demand) in demands.iter().enumerate() {
            let item = (pos + 1) as u32;
            let terms: Vec<(minilp::Variable, f64)> = columns
                .iter()
                .enumerate()
                .filter_map(|(j, col)| {
                    col.counts
                        .iter()
                        .find(|&&(i, _)| i == item)
                        .map(|&(_, c)| (vars[j], c as f64))
                })
                .collect();
            problem.add_constraint(&terms, ComparisonOp::Eq, demand as f64);
        }
        let solution = problem.solve()?;
        let values = vars.iter().map(|&v| solution[v]).collect();
        Ok((solution.objective(), values))
    };

    let mut incumbent: Option<(Cost, Vec<u64>)> = None;
    let mut bb_nodes = 0u64;
    let mut lp_root: Option<f64> = None;
    let mut stack = vec![Node {
        lower: vec![0; columns.len()],
        upper: columns.iter().map(|c| c.upper).collect(),
    }];
    let mut is_root = true;

    while let Some(node) = stack.pop() {
        if let Some(limit) = config.time_limit {
            if started.elapsed() > limit {
                return Ok(SolveReport::limit(format!(
                    "time limit of {limit:?} reached after {bb_nodes} nodes"
                )));
            }
        }
        if let Some(limit) = config.node_limit {
            if bb_nodes > limit {
                return Ok(SolveReport::limit(format!(
                    "node limit of {limit} reached"
                )));
            }
        }
        if !is_root {
            bb_nodes += 1;
        }
        is_root = false;
        if node.lower.iter().zip(&node.upper).any(|(lo, up)| lo > up) {
            continue;
        }

        // Exact bound from the fixed part plus the volume floor.
        let mut residual = demands.clone();
        let mut fixed_cost = Cost::zero();
        let mut infeasible_fix = false;
        for (j, col) in columns.iter().enumerate() {
            if node.lower[j] > 0 {
                fixed_cost += col.cost.clone() * Cost::from_integer(node.lower[j] as i64);
                for &(item, c) in &col.counts {
                    let slot = &mut residual[(item - 1) as usize];
                    let take = node.lower[j] * c as u64;
                    if take > *slot {
                        infeasible_fix = true;
                        break;
                    }
                    *slot -= take;
                }
            }
            if infeasible_fix {
                break;
            }
        }
        if infeasible_fix {
            continue;
        }
        let exact_bound = fixed_cost.clone() + volume_bound(instance, &residual);
        if let Some((best, _)) = &incumbent {
            if &exact_bound >= best {
                continue;
            }
        }

        let (lp_value, lp_solution) = match solve_lp(&node) {
            Ok(result) => result,
            Err(minilp::Error::Infeasible) => continue,
            Err(_) => {
                // Numerical trouble: fall back to enumeration on this node.
                (f64::NEG_INFINITY, Vec::new())
            }
        };
        if lp_root.is_none() {
            lp_root = Some(lp_value.max(0.0));
        }
        if let Some((best, _)) = &incumbent {
            let best_f64 = best.to_f64().unwrap_or(f64::MAX);
            if lp_value >= best_f64 - 1e-6 * (1.0 + best_f64.abs()) {
                continue;
            }
        }

        // Fractional pattern with the largest load, if any.
        let fractional = lp_solution
            .iter()
            .enumerate()
            .filter(|(_, &x)| (x - x.round()).abs() > 1e-7)
            .max_by(|(i, a), (j, b)| {
                a.partial_cmp(b)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(j.cmp(i))
            })
            .map(|(j, &x)| (j, x));

        match fractional {
            None if !lp_solution.is_empty() => {
                // Integral relaxation: round and check exactly.
                let mults: Vec<u64> = lp_solution.iter().map(|&x| x.round() as u64).collect();
                let mut covered = vec![0u64; demands.len()];
                for (j, &m) in mults.iter().enumerate() {
                    for &(item, c) in &columns[j].counts {
                        covered[(item - 1) as usize] += m * c as u64;
                    }
                }
                if covered == demands {
                    let cost: Cost = mults
                        .iter()
                        .enumerate()
                        .map(|(j, &m)| columns[j].cost.clone() * Cost::from_integer(m as i64))
                        .sum();
                    let better = incumbent
                        .as_ref()
                        .map_or(true, |(best, _)| &cost < best);
                    if better {
                        incumbent = Some((cost, mults));
                    }
                }
            }
            None => {
                // The relaxation failed numerically; enumerate by splitting
                // the first open pattern.
                if let Some(j) = (0..columns.len()).find(|&j| node.lower[j] < node.upper[j]) {
                    let mut fix_low = Node {
                        lower: node.lower.clone(),
                        upper: node.upper.clone(),
                    };
                    fix_low.upper[j] = node.lower[j];
                    let mut bump = Node {
                        lower: node.lower,
                        upper: node.upper,
                    };
                    bump.lower[j] += 1;
                    stack.push(fix_low);
                    stack.push(bump);
                }
            }
            Some((j, x)) => {
                let mut down = Node {
                    lower: node.lower.clone(),
                    upper: node.upper.clone(),
                };
                down.upper[j] = x.floor() as u64;
                let mut up = Node {
                    lower: node.lower,
                    upper: node.upper,
                };
                up.lower[j] = x.ceil() as u64;
                // Dive on the rounded-up branch first.
                stack.push(down);
                stack.push(up);
            }
        }
    }

    let Some((_, mults)) = incumbent else {
        return Ok(SolveReport {
            status: SolveStatus::Infeasible,
            objective: None,
            flows: Vec::new(),
            z: 0,
            bb_nodes,
            lp_bound: lp_root,
            time_model: started.elapsed(),
            time_total: started.elapsed(),
            message: Some("no exact cover exists".into()),
        });
    };
    let bins: Vec<(u32, Vec<usize>, u64)> = columns
        .iter()
        .zip(&mults)
        .filter(|(_, &m)| m > 0)
        .map(|(col, &m)| (col.bin_type, col.witness.clone(), m))
        .collect();
    let (flows, z) = flows_from_paths(model, graph, &bins)?;
    let objective = verify_solution(model, &flows, z)?;
    Ok(SolveReport {
        status: SolveStatus::Optimal,
        objective: Some(objective),
        flows,
        z,
        bb_nodes,
        lp_bound: lp_root,
        time_model: started.elapsed(),
        time_total: started.elapsed(),
        message: None,
    })
}
