//! Path enumeration: the item-index multisets realized by the per-type
//! source-target paths.  Used as a verification surface and to feed the
//! built-in pattern solver; the enumeration refuses graphs with too many
//! paths instead of silently grinding.

use std::collections::{BTreeMap, BTreeSet};

use super::{ArcFlowGraph, NodeId};
use crate::error::{Error, Result};

/// A pattern as a sorted multiset of 1-based item indices.
pub type Pattern = Vec<u32>;

pub type PatternSet = BTreeSet<Pattern>;

/// Default ceiling on the number of per-type source-target paths.
pub const DEFAULT_PATH_CAP: u64 = 1_000_000;

/// Counts source-target paths of one component, saturating at `cap + 1`.
fn count_paths(graph: &ArcFlowGraph, bin_type: u32, cap: u64) -> Result<u64> {
    let s_t = graph.type_source(bin_type)?;
    let t_t = graph.type_target(bin_type)?;
    let n = graph.num_nodes();
    let mut count = vec![0u64; n];
    count[t_t.idx()] = 1;
    // Node ids are topological; walk arcs backwards.
    let ceiling = cap.saturating_add(1);
    for arc in graph.arcs().iter().rev() {
        if graph.component(arc.tail) == Some(bin_type) {
            let c = count[arc.head.idx()];
            count[arc.tail.idx()] = count[arc.tail.idx()].saturating_add(c).min(ceiling);
        }
    }
    Ok(count[s_t.idx()])
}

/// The set of item-index multisets over all source-target paths of the
/// component for `bin_type`.  Fails when the path count exceeds `path_cap`.
pub fn enumerate_patterns(
    graph: &ArcFlowGraph,
    bin_type: u32,
    path_cap: u64,
) -> Result<PatternSet> {
    let with_witness = enumerate_patterns_with_witness(graph, bin_type, path_cap, u64::MAX)?;
    Ok(with_witness.into_keys().collect())
}

/// Like [`enumerate_patterns`] but keeps, per pattern, the first witness
/// path found (as arc indices into the graph).  Also enforces a cap on the
/// number of distinct patterns.
pub fn enumerate_patterns_with_witness(
    graph: &ArcFlowGraph,
    bin_type: u32,
    path_cap: u64,
    pattern_cap: u64,
) -> Result<BTreeMap<Pattern, Vec<usize>>> {
    let paths = count_paths(graph, bin_type, path_cap)?;
    if paths > path_cap {
        return Err(Error::CapExceeded(format!(
            "bin type {bin_type} has more than {path_cap} source-target paths"
        )));
    }
    let s_t = graph.type_source(bin_type)?;
    let t_t = graph.type_target(bin_type)?;
    let adj = graph.out_adjacency();

    let mut patterns: BTreeMap<Pattern, Vec<usize>> = BTreeMap::new();
    // Depth-first walk; each stack frame remembers which out-arc to try
    // next.  Arc indices are sorted, so the walk is deterministic.
    let mut stack: Vec<(NodeId, usize)> = vec![(s_t, 0)];
    let mut arc_trail: Vec<usize> = Vec::new();
    while let Some((node, next)) = stack.last_mut() {
        if *node == t_t {
            let mut pattern: Pattern = arc_trail
                .iter()
                .map(|&i| graph.arcs()[i].label)
                .filter(|l| !l.is_loss())
                .map(|l| l.item)
                .collect();
            pattern.sort_unstable();
            if !patterns.contains_key(&pattern) {
                if patterns.len() as u64 >= pattern_cap {
                    return Err(Error::CapExceeded(format!(
                        "bin type {bin_type} has more than {pattern_cap} distinct patterns"
                    )));
                }
                patterns.insert(pattern, arc_trail.clone());
            }
            stack.pop();
            arc_trail.pop();
            continue;
        }
        let arcs_here = &adj[node.idx()];
        let mut advanced = false;
        while *next < arcs_here.len() {
            let arc_idx = arcs_here[*next];
            *next += 1;
            let arc = graph.arcs()[arc_idx];
            if graph.component(arc.head) == Some(bin_type) || arc.head == t_t {
                stack.push((arc.head, 0));
                arc_trail.push(arc_idx);
                advanced = true;
                break;
            }
        }
        if !advanced {
            stack.pop();
            arc_trail.pop();
        }
    }
    Ok(patterns)
}
