//! Final compression of the stitched graph.
//!
//! Nodes of the same bin-type component that receive identical longest-path
//! labels are merged, arcs are re-targeted, and parallel arcs for different
//! incarnations of the same item are deduplicated.  Because the stitched
//! graph contains every valid pattern, any path the merge introduces is
//! harmless as long as it is itself valid, and the per-type pattern sets
//! are then preserved exactly.  Capacity validity follows from the label
//! monotonicity.  Demand validity needs care: collapsing all equal-label
//! nodes can let a path pick up more units of an item than its demand.  The
//! merge therefore runs in two passes.  The first merges on labels alone
//! and checks, per item, the longest unit count over any path.  For the few
//! items that can overshoot, the second pass adds to the merge key the
//! maximum future unit count of that item, a quantity that never increases
//! along an arc faster than units are consumed; nodes agreeing on it can be
//! merged without ever letting the item's count exceed its demand.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{psi_labels, Arc, ArcFlowGraph, ArcLabel, GraphStats, NodeId, NodeKind};
use crate::instance::Instance;

/// Applies the final compression step.  Returns the compressed graph, with
/// longest-path labels attached, and the removal statistics relative to the
/// input graph.
pub fn compress_final(graph: &ArcFlowGraph, instance: &Instance) -> (ArcFlowGraph, GraphStats) {
    let n = graph.num_nodes();
    let psi = psi_labels(graph, instance);
    let overcap = overcap_items(instance);

    let mut guard_items: Vec<u32> = Vec::new();
    let merged = loop {
        let parts = build_parts(graph, instance, &psi, &guard_items);
        let candidate = apply_parts(graph, &parts);
        match validate_merge(&candidate, graph, instance, &overcap) {
            MergeCheck::Ok => break candidate,
            MergeCheck::DemandViolations(items) => {
                // Guarded items can no longer violate, so the guard list
                // grows strictly and the loop terminates.
                debug_assert!(items.iter().all(|i| !guard_items.contains(i)));
                guard_items.extend(items);
                guard_items.sort_unstable();
                guard_items.dedup();
            }
            MergeCheck::Cycle => {
                // Only reachable through zero-weight incarnations; merging
                // is not worth chasing there.
                break apply_parts(graph, &[]);
            }
        }
    };

    let compressed = renumber(graph, &psi, &merged);
    debug_assert!(compressed.check_structure().is_ok());
    let stats = GraphStats {
        num_vertices: compressed.num_nodes(),
        num_arcs: compressed.num_arcs(),
        pct_vertices_removed: 100.0 * (n - compressed.num_nodes()) as f64 / n as f64,
        pct_arcs_removed: 100.0 * (graph.num_arcs() - compressed.num_arcs()) as f64
            / graph.num_arcs().max(1) as f64,
    };
    (compressed, stats)
}

/// Items whose demand cap could conceivably be exceeded inside a single
/// bin; all others need no protection.
fn overcap_items(instance: &Instance) -> Vec<u32> {
    instance
        .items
        .iter()
        .filter(|item| {
            let copies = item.demand.saturating_add(1);
            instance.bins.iter().any(|bin| {
                (0..instance.dims).all(|d| {
                    let min_weight = item
                        .incarnations
                        .iter()
                        .map(|inc| inc.weight[d] as u64)
                        .min()
                        .unwrap();
                    min_weight.saturating_mul(copies) <= bin.capacity[d] as u64
                })
            })
        })
        .map(|item| item.index)
        .collect()
}

/// Per-node merge guard for one item.  Any per-node value that rises by at
/// least one across every arc consuming the item, and spans at most the
/// demand between super source and target, keeps merged paths within the
/// demand as long as merged nodes agree on it.  Two such potentials exist
/// naturally: the maximum unit count still ahead of the node, and the
/// maximum count already behind it (frozen at the demand once the item is
/// out of reach).  Their safety proofs are independent, so each item may
/// use whichever splits the label groups less.
fn demand_guard(graph: &ArcFlowGraph, item: u32, demand: u64) -> Vec<u64> {
    let n = graph.num_nodes();
    let mut suf = vec![0u64; n];
    for arc in graph.arcs().iter().rev() {
        let gain = suf[arc.head.idx()] + u64::from(arc.label.item == item);
        let entry = &mut suf[arc.tail.idx()];
        *entry = (*entry).max(gain);
    }
    let mut pre = vec![0u64; n];
    for arc in graph.arcs() {
        let gain = pre[arc.tail.idx()] + u64::from(arc.label.item == item);
        let entry = &mut pre[arc.head.idx()];
        *entry = (*entry).max(gain);
    }
    let ahead: Vec<u64> = suf.clone();
    let behind: Vec<u64> = (0..n)
        .map(|v| if suf[v] == 0 { demand } else { pre[v] })
        .collect();
    let distinct = |values: &[u64]| {
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len()
    };
    if distinct(&behind) <= distinct(&ahead) {
        behind
    } else {
        ahead
    }
}

/// Merge parts: same component, same label, same future-count profile for
/// the guarded items, and never two endpoints of an item arc in one part
/// (those would self-loop and lose a pattern; only zero-weight incarnations
/// can produce them).
fn build_parts(
    graph: &ArcFlowGraph,
    instance: &Instance,
    psi: &[Vec<u64>],
    guard_items: &[u32],
) -> Vec<Vec<usize>> {
    let n = graph.num_nodes();
    let profiles: Vec<Vec<u64>> = guard_items
        .iter()
        .map(|&item| demand_guard(graph, item, instance.item(item).demand))
        .collect();

    let mut groups: BTreeMap<(u32, Vec<u64>, Vec<u64>), Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        if let NodeKind::Inner { bin_type } = graph.node_kind(NodeId(v as u32)) {
            let profile: Vec<u64> = profiles.iter().map(|p| p[v]).collect();
            groups
                .entry((bin_type, psi[v].clone(), profile))
                .or_default()
                .push(v);
        }
    }

    let mut parts: Vec<Vec<usize>> = Vec::new();
    for (_, members) in groups {
        if members.len() < 2 {
            continue;
        }
        let member_set: BTreeSet<usize> = members.iter().copied().collect();
        let mut conflicts: BTreeSet<(usize, usize)> = BTreeSet::new();
        for arc in graph.arcs() {
            if !arc.label.is_loss()
                && member_set.contains(&arc.tail.idx())
                && member_set.contains(&arc.head.idx())
            {
                conflicts.insert((arc.tail.idx(), arc.head.idx()));
                conflicts.insert((arc.head.idx(), arc.tail.idx()));
            }
        }
        if conflicts.is_empty() {
            parts.push(members);
            continue;
        }
        let mut split: Vec<Vec<usize>> = Vec::new();
        for v in members {
            let slot = split
                .iter()
                .position(|part| part.iter().all(|&u| !conflicts.contains(&(u, v))));
            match slot {
                Some(idx) => split[idx].push(v),
                None => split.push(vec![v]),
            }
        }
        parts.extend(split.into_iter().filter(|p| p.len() >= 2));
    }
    parts
}

/// A tentative merge: representative per node plus the merged arc set
/// (original node ids, loss self-loops dropped, duplicates collapsed).
struct Merged {
    rep: Vec<usize>,
    arcs: BTreeSet<(usize, usize, u32, u32)>,
}

fn apply_parts(graph: &ArcFlowGraph, parts: &[Vec<usize>]) -> Merged {
    let n = graph.num_nodes();
    let mut rep: Vec<usize> = (0..n).collect();
    for part in parts {
        let leader = part[0];
        for &v in &part[1..] {
            rep[v] = leader;
        }
    }
    let mut arcs = BTreeSet::new();
    for arc in graph.arcs() {
        let tail = rep[arc.tail.idx()];
        let head = rep[arc.head.idx()];
        if tail == head {
            debug_assert!(arc.label.is_loss());
            continue;
        }
        arcs.insert((tail, head, arc.label.item, arc.label.variant));
    }
    Merged { rep, arcs }
}

enum MergeCheck {
    Ok,
    Cycle,
    /// Items some path of the merged graph over-packs.
    DemandViolations(Vec<u32>),
}

fn validate_merge(
    merged: &Merged,
    graph: &ArcFlowGraph,
    instance: &Instance,
    overcap: &[u32],
) -> MergeCheck {
    // Dense ids for the surviving representatives.
    let reps: Vec<usize> = (0..graph.num_nodes())
        .filter(|&v| merged.rep[v] == v)
        .collect();
    let dense: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let k = reps.len();
    let mut out: Vec<Vec<(usize, u32)>> = vec![Vec::new(); k];
    let mut indegree = vec![0usize; k];
    for &(tail, head, item, _) in &merged.arcs {
        let t = dense[&tail];
        let h = dense[&head];
        out[t].push((h, item));
        indegree[h] += 1;
    }

    // Kahn topological order.
    let mut queue: Vec<usize> = (0..k).filter(|&v| indegree[v] == 0).collect();
    let mut topo = Vec::with_capacity(k);
    let mut head = 0;
    while head < queue.len() {
        let v = queue[head];
        head += 1;
        topo.push(v);
        for &(h, _) in &out[v] {
            indegree[h] -= 1;
            if indegree[h] == 0 {
                queue.push(h);
            }
        }
    }
    if topo.len() != k {
        return MergeCheck::Cycle;
    }

    // Longest unit count over any source-target path, one pass per item
    // that could exceed its demand.  Counts propagate only from the source
    // so unreachable fragments cannot fake a violation.
    let source = dense[&graph.source().idx()];
    let target = dense[&graph.target().idx()];
    let mut violations = Vec::new();
    for &item in overcap {
        let demand = instance.item(item).demand;
        let mut count: Vec<Option<u64>> = vec![None; k];
        count[source] = Some(0);
        for &v in &topo {
            let Some(base) = count[v] else { continue };
            for &(h, arc_item) in &out[v] {
                let gain = base + u64::from(arc_item == item);
                if count[h].map_or(true, |c| gain > c) {
                    count[h] = Some(gain);
                }
            }
        }
        if count[target].is_some_and(|c| c > demand) {
            violations.push(item);
        }
    }
    if violations.is_empty() {
        MergeCheck::Ok
    } else {
        MergeCheck::DemandViolations(violations)
    }
}

/// Renumbers the merged graph into a fresh topologically ordered
/// [`ArcFlowGraph`] carrying the longest-path labels.
fn renumber(graph: &ArcFlowGraph, psi: &[Vec<u64>], merged: &Merged) -> ArcFlowGraph {
    let reps: Vec<usize> = (0..graph.num_nodes())
        .filter(|&v| merged.rep[v] == v)
        .collect();
    let dense: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let k = reps.len();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut indegree = vec![0usize; k];
    for &(tail, head, _, _) in &merged.arcs {
        out[dense[&tail]].push(dense[&head]);
        indegree[dense[&head]] += 1;
    }
    // Kahn with smallest-old-id-first tie breaking for a stable numbering.
    let mut ready: BTreeSet<usize> = (0..k).filter(|&v| indegree[v] == 0).collect();
    let mut new_id: Vec<usize> = vec![usize::MAX; k];
    let mut order = 0usize;
    while let Some(&v) = ready.iter().next() {
        ready.remove(&v);
        new_id[v] = order;
        order += 1;
        for &h in &out[v] {
            indegree[h] -= 1;
            if indegree[h] == 0 {
                ready.insert(h);
            }
        }
    }
    debug_assert_eq!(order, k);

    let mut node_kinds = vec![NodeKind::Target; k];
    let mut labels = vec![Vec::new(); k];
    for (dense_id, &rep) in reps.iter().enumerate() {
        let id = new_id[dense_id];
        node_kinds[id] = graph.node_kind(NodeId(rep as u32));
        labels[id] = psi[rep].clone();
    }
    let mut arcs: Vec<Arc> = merged
        .arcs
        .iter()
        .map(|&(tail, head, item, variant)| Arc {
            tail: NodeId(new_id[dense[&tail]] as u32),
            head: NodeId(new_id[dense[&head]] as u32),
            label: ArcLabel { item, variant },
        })
        .collect();
    // Parallel arcs for different incarnations of the same item are
    // redundant; keep the smallest variant.
    arcs.sort();
    arcs.dedup_by_key(|arc| (arc.tail, arc.head, arc.label.item));

    let remap = |old: NodeId| NodeId(new_id[dense[&merged.rep[old.idx()]]] as u32);
    let type_sources = graph
        .bin_types()
        .iter()
        .map(|&t| remap(graph.type_source(t).unwrap()))
        .collect();
    let type_targets = graph
        .bin_types()
        .iter()
        .map(|&t| remap(graph.type_target(t).unwrap()))
        .collect();

    ArcFlowGraph {
        dims: graph.dims(),
        node_kinds,
        arcs,
        bin_types: graph.bin_types().to_vec(),
        type_sources,
        type_targets,
        psi: Some(labels),
    }
}
