//! From an optimal flow to concrete bins.
//!
//! The positive-flow subgraph is peeled into source-target paths, one bin
//! per unit of circulation.  Arc deduplication erased incarnation identity,
//! so each item in a bin is re-assigned a concrete incarnation: candidates
//! are tried lightest first (lexicographically) against the residual
//! capacity, backtracking across the bin's items when a greedy pick blocks
//! a later one.  Extracted solutions are validated against the instance,
//! never against the graph that produced them.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{psi_labels, ArcFlowGraph};
use crate::instance::{cost_to_string, Cost, Instance};
use crate::solve::SolveReport;
use std::collections::BTreeSet;

/// One packed bin: its type and the chosen item incarnations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bin {
    pub bin_type: u32,
    pub contents: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingSolution {
    pub bins: Vec<Bin>,
    pub total_cost: Cost,
    pub fingerprint: String,
}

/// Decomposes verified optimal flows into bins.
pub fn extract(
    graph: &ArcFlowGraph,
    report: &SolveReport,
    instance: &Instance,
) -> Result<PackingSolution> {
    if report.flows.len() != graph.num_arcs() {
        return Err(Error::Extraction(format!(
            "report carries {} flows for a graph with {} arcs",
            report.flows.len(),
            graph.num_arcs()
        )));
    }
    let psi_store;
    let psi: &[Vec<u64>] = match graph.node_labels() {
        Some(labels) => labels,
        None => {
            psi_store = psi_labels(graph, instance);
            &psi_store
        }
    };
    let mut residual = report.flows.clone();
    let adjacency = graph.out_adjacency();
    let source = graph.source();
    let target = graph.target();

    let mut bins = Vec::with_capacity(report.z as usize);
    for _ in 0..report.z {
        // Walk one unit of flow, always along the arc with the smallest
        // (head label, item, variant, head id).
        let mut node = source;
        let mut items: Vec<u32> = Vec::new();
        let mut bin_type: Option<u32> = None;
        while node != target {
            let next_arc = adjacency[node.idx()]
                .iter()
                .copied()
                .filter(|&idx| residual[idx] > 0)
                .min_by(|&a, &b| {
                    let (aa, ab) = (graph.arcs()[a], graph.arcs()[b]);
                    psi[aa.head.idx()]
                        .cmp(&psi[ab.head.idx()])
                        .then(aa.label.cmp(&ab.label))
                        .then(aa.head.cmp(&ab.head))
                })
                .ok_or_else(|| {
                    Error::Extraction(format!(
                        "flow not decomposable: no outgoing flow at node {node}"
                    ))
                })?;
            residual[next_arc] -= 1;
            let arc = graph.arcs()[next_arc];
            if !arc.label.is_loss() {
                items.push(arc.label.item);
            }
            if bin_type.is_none() {
                bin_type = graph.component(arc.head);
            }
            node = arc.head;
        }
        let bin_type = bin_type
            .ok_or_else(|| Error::Extraction("path never entered a component".into()))?;
        items.sort_unstable();
        let contents = restore_incarnations(instance, bin_type, &items)?;
        bins.push(Bin { bin_type, contents });
    }
    if residual.iter().any(|&f| f > 0) {
        return Err(Error::Extraction(
            "flow not decomposable: residual flow after peeling z paths".into(),
        ));
    }

    let total_cost: Cost = bins
        .iter()
        .map(|b| instance.bin(b.bin_type).cost.clone())
        .sum();
    if let Some(objective) = &report.objective {
        if &total_cost != objective {
            return Err(Error::Extraction(format!(
                "bin costs sum to {} but the solver reported {}",
                cost_to_string(&total_cost),
                cost_to_string(objective)
            )));
        }
    }
    Ok(PackingSolution {
        bins,
        total_cost,
        fingerprint: instance.fingerprint(),
    })
}

/// Assigns a concrete incarnation to every item of a bin, lightest first,
/// backtracking when necessary.  Fails only if no assignment fits, which
/// would mean the graph carried an invalid pattern.
fn restore_incarnations(
    instance: &Instance,
    bin_type: u32,
    items: &[u32],
) -> Result<Vec<(u32, u32)>> {
    let capacity = &instance.bin(bin_type).capacity;
    // Candidates per unit, lightest (lexicographically) first.
    let candidates: Vec<Vec<(u32, &[u32])>> = items
        .iter()
        .map(|&item| {
            let mut incs: Vec<(u32, &[u32])> = instance
                .item(item)
                .incarnations
                .iter()
                .map(|inc| (inc.variant, inc.weight.as_slice()))
                .collect();
            incs.sort_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)));
            incs
        })
        .collect();
    let mut chosen: Vec<u32> = Vec::with_capacity(items.len());
    let mut used = vec![0u64; instance.dims];

    fn assign(
        unit: usize,
        candidates: &[Vec<(u32, &[u32])>],
        capacity: &[u32],
        used: &mut Vec<u64>,
        chosen: &mut Vec<u32>,
    ) -> bool {
        if unit == candidates.len() {
            return true;
        }
        for &(variant, weight) in &candidates[unit] {
            let fits_here = (0..used.len())
                .all(|d| used[d] + weight[d] as u64 <= capacity[d] as u64);
            if !fits_here {
                continue;
            }
            for d in 0..used.len() {
                used[d] += weight[d] as u64;
            }
            chosen.push(variant);
            if assign(unit + 1, candidates, capacity, used, chosen) {
                return true;
            }
            chosen.pop();
            for d in 0..used.len() {
                used[d] -= weight[d] as u64;
            }
        }
        false
    }

    if !assign(0, &candidates, capacity, &mut used, &mut chosen) {
        return Err(Error::Extraction(format!(
            "incarnation restoration failed for items {items:?} in a type {bin_type} bin"
        )));
    }
    Ok(items.iter().copied().zip(chosen).collect())
}

/// Outcome of validating a candidate solution against the instance.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks capacities, demand senses, incarnation well-formedness and cost
/// arithmetic.  Violations are report content, not errors.
pub fn validate(
    solution: &PackingSolution,
    instance: &Instance,
    j_set: &BTreeSet<u32>,
) -> ValidationReport {
    let mut violations = Vec::new();
    let mut delivered = vec![0u64; instance.num_items()];
    for (pos, bin) in solution.bins.iter().enumerate() {
        if bin.bin_type == 0 || bin.bin_type as usize > instance.num_bins() {
            violations.push(format!("bin {}: unknown bin type {}", pos + 1, bin.bin_type));
            continue;
        }
        let capacity = &instance.bin(bin.bin_type).capacity;
        let mut load = vec![0u64; instance.dims];
        for &(item, variant) in &bin.contents {
            if item == 0
                || item as usize > instance.num_items()
                || variant == 0
                || variant as usize > instance.item(item).incarnations.len()
            {
                violations.push(format!(
                    "bin {}: incarnation ({item}, {variant}) does not exist",
                    pos + 1
                ));
                continue;
            }
            delivered[(item - 1) as usize] += 1;
            let weight = instance.weight(item, variant);
            for d in 0..instance.dims {
                load[d] += weight[d] as u64;
            }
        }
        for d in 0..instance.dims {
            if load[d] > capacity[d] as u64 {
                violations.push(format!(
                    "bin {}: dimension {} overfilled ({} > {})",
                    pos + 1,
                    d + 1,
                    load[d],
                    capacity[d]
                ));
            }
        }
    }
    for item in &instance.items {
        let got = delivered[(item.index - 1) as usize];
        if j_set.contains(&item.index) {
            if got != item.demand {
                violations.push(format!(
                    "demand of item {}: {} != {}",
                    item.index, got, item.demand
                ));
            }
        } else if got < item.demand {
            violations.push(format!(
                "demand of item {}: {} < {}",
                item.index, got, item.demand
            ));
        }
    }
    let cost: Cost = solution
        .bins
        .iter()
        .filter(|b| b.bin_type >= 1 && b.bin_type as usize <= instance.num_bins())
        .map(|b| instance.bin(b.bin_type).cost.clone())
        .sum();
    if cost != solution.total_cost {
        violations.push(format!(
            "total cost {} does not match the bins ({})",
            cost_to_string(&solution.total_cost),
            cost_to_string(&cost)
        ));
    }
    ValidationReport { violations }
}

/// One line per bin: `t: (i,j) (i,j) ...`.
pub fn render_text(solution: &PackingSolution) -> String {
    let mut out = String::new();
    for bin in &solution.bins {
        out.push_str(&format!("{}:", bin.bin_type));
        for &(item, variant) in &bin.contents {
            out.push_str(&format!(" ({item},{variant})"));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct JsonSolution<'a> {
    total_cost: String,
    total_cost_value: f64,
    bins: &'a [Bin],
    fingerprint: &'a str,
}

pub fn render_json(solution: &PackingSolution) -> String {
    use num_traits::ToPrimitive;
    let doc = JsonSolution {
        total_cost: cost_to_string(&solution.total_cost),
        total_cost_value: solution.total_cost.to_f64().unwrap_or(f64::NAN),
        bins: &solution.bins,
        fingerprint: &solution.fingerprint,
    };
    serde_json::to_string_pretty(&doc).expect("solution serializes")
}

/// Parses the text rendering back into bins (for the validate command).
pub fn parse_text(text: &str, instance: &Instance) -> Result<PackingSolution> {
    let mut bins = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (type_part, rest) = line.split_once(':').ok_or_else(|| {
            Error::syntax(lineno + 1, 1, "expected `type: (i,j) ...`".to_string())
        })?;
        let bin_type: u32 = type_part.trim().parse().map_err(|_| {
            Error::syntax(lineno + 1, 1, format!("invalid bin type `{type_part}`"))
        })?;
        let mut contents = Vec::new();
        for token in rest.split_whitespace() {
            let inner = token
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| {
                    Error::syntax(lineno + 1, 1, format!("invalid entry `{token}`"))
                })?;
            let (i, j) = inner.split_once(',').ok_or_else(|| {
                Error::syntax(lineno + 1, 1, format!("invalid entry `{token}`"))
            })?;
            let item: u32 = i.trim().parse().map_err(|_| {
                Error::syntax(lineno + 1, 1, format!("invalid item in `{token}`"))
            })?;
            let variant: u32 = j.trim().parse().map_err(|_| {
                Error::syntax(lineno + 1, 1, format!("invalid variant in `{token}`"))
            })?;
            contents.push((item, variant));
        }
        bins.push(Bin { bin_type, contents });
    }
    let total_cost: Cost = bins
        .iter()
        .map(|b| {
            if b.bin_type >= 1 && b.bin_type as usize <= instance.num_bins() {
                instance.bin(b.bin_type).cost.clone()
            } else {
                Cost::zero()
            }
        })
        .sum();
    Ok(PackingSolution {
        bins,
        total_cost,
        fingerprint: instance.fingerprint(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_type_graph, compress_final, stitch};
    use crate::model::{assemble, default_j};
    use crate::solve::{solve, BackendConfig};

    fn solved_sample() -> (Instance, ArcFlowGraph, SolveReport) {
        let inst = crate::graph::tests::sample_instance();
        let graphs = (1..=2)
            .map(|t| build_type_graph(&inst, t).unwrap())
            .collect();
        let g = stitch(graphs).unwrap();
        let (c, _) = compress_final(&g, &inst);
        let model = assemble(&c, &inst, &default_j(&inst)).unwrap();
        let report = solve(&model, &c, &inst, &BackendConfig::builtin()).unwrap();
        (inst, c, report)
    }

    #[test]
    fn extracts_the_expected_bins() {
        let (inst, graph, report) = solved_sample();
        let solution = extract(&graph, &report, &inst).unwrap();
        assert_eq!(solution.total_cost, Cost::from_integer(5));
        assert_eq!(solution.bins.len(), 2);
        assert_eq!(
            solution.bins[0],
            Bin {
                bin_type: 1,
                contents: vec![(1, 1), (2, 2)],
            }
        );
        assert_eq!(
            solution.bins[1],
            Bin {
                bin_type: 2,
                contents: vec![(1, 1)],
            }
        );
    }

    #[test]
    fn extraction_is_deterministic() {
        let (inst, graph, report) = solved_sample();
        let a = render_text(&extract(&graph, &report, &inst).unwrap());
        let b = render_text(&extract(&graph, &report, &inst).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn validate_passes_extracted_solution() {
        let (inst, graph, report) = solved_sample();
        let solution = extract(&graph, &report, &inst).unwrap();
        let verdict = validate(&solution, &inst, &default_j(&inst));
        assert!(verdict.passed(), "{:?}", verdict.violations);
    }

    #[test]
    fn validate_spots_missing_demand() {
        let (inst, graph, report) = solved_sample();
        let mut solution = extract(&graph, &report, &inst).unwrap();
        // Delete the type-2 bin holding one unit of item 1.
        solution.bins.retain(|b| b.bin_type != 2);
        solution.total_cost = Cost::from_integer(3);
        let verdict = validate(&solution, &inst, &default_j(&inst));
        assert!(!verdict.passed());
        assert!(verdict
            .violations
            .iter()
            .any(|v| v.contains("demand of item 1: 1 < 2")));
    }

    #[test]
    fn validate_spots_overfilled_dimension() {
        let (inst, graph, report) = solved_sample();
        let mut solution = extract(&graph, &report, &inst).unwrap();
        // Swap item 2 to its (40, 15) incarnation: 75 + 40 exceeds 100.
        for bin in &mut solution.bins {
            for entry in &mut bin.contents {
                if entry.0 == 2 {
                    entry.1 = 1;
                }
            }
        }
        let verdict = validate(&solution, &inst, &default_j(&inst));
        assert!(!verdict.passed());
        assert!(verdict
            .violations
            .iter()
            .any(|v| v.contains("dimension 1")));
    }

    #[test]
    fn zero_flow_means_zero_bins() {
        let inst = Instance::new(
            1,
            vec![],
            vec![crate::instance::BinType {
                index: 1,
                capacity: vec![4],
                cost: Cost::from_integer(1),
            }],
        )
        .unwrap();
        let g = stitch(vec![build_type_graph(&inst, 1).unwrap()]).unwrap();
        let (c, _) = compress_final(&g, &inst);
        let model = assemble(&c, &inst, &default_j(&inst)).unwrap();
        let report = solve(&model, &c, &inst, &BackendConfig::builtin()).unwrap();
        let solution = extract(&c, &report, &inst).unwrap();
        assert!(solution.bins.is_empty());
        assert_eq!(solution.total_cost, Cost::zero());
    }

    #[test]
    fn text_round_trip() {
        let (inst, graph, report) = solved_sample();
        let solution = extract(&graph, &report, &inst).unwrap();
        let text = render_text(&solution);
        let reparsed = parse_text(&text, &inst).unwrap();
        assert_eq!(solution.bins, reparsed.bins);
        assert_eq!(solution.total_cost, reparsed.total_cost);
    }

    #[test]
    fn backtracking_restoration_handles_blocking_greedy() {
        // Item 1 has incarnations (1,4) and (2,1); item 2 only (2,3).  In a
        // (4,4) bin the lexicographically lighter (1,4) blocks item 2, so
        // restoration must back off and use (2,1).
        let inst = crate::instance::parse_instance(
            "2\n1\n1 4 4\n2\n1 2\n  1 4\n  2 1\n1 1\n  2 3\n",
        )
        .unwrap();
        let contents = restore_incarnations(&inst, 1, &[1, 2]).unwrap();
        assert_eq!(contents, vec![(1, 2), (2, 1)]);
    }
}
