//! Per-bin-type graph construction.
//!
//! The graph for bin type `t` is built by dynamic programming over states
//! `(item position, units taken, last variant, used capacity)`, processing
//! incarnations in a fixed order: items sorted by decreasing weight
//! (lexicographically, by their heaviest incarnation), incarnations within
//! an item by decreasing weight.  Along any path the arcs of one item are
//! consecutive and capped at its demand, so paths are exactly the valid
//! patterns.
//!
//! Two merging passes compress the state graph without changing its
//! pattern set.  First, states are relabeled by their longest completion
//! in each dimension and merged when they agree on it and on the item
//! position and count: any path through such a merged node stays within
//! capacity (the completion label rises along arcs at least as fast as
//! weight accumulates) and within demands (positions only advance, so an
//! item's arcs cannot be revisited), and a valid path's pattern is already
//! in the graph because the graph is complete.  Second, nodes whose sets
//! of completions coincide are folded together.  The per-type graph
//! therefore arrives already compressed.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Hard ceiling on the number of dynamic-programming states per bin type;
/// protects against degenerate inputs such as zero-weight incarnations with
/// huge demands.
const STATE_BUDGET: usize = 5_000_000;

/// One item position in the fixed construction order.
struct OrderedItem {
    item: u32,
    demand: u64,
    /// (variant, weight), heaviest first.
    incarnations: Vec<(u32, Vec<u32>)>,
}

fn construction_order(instance: &Instance) -> Vec<OrderedItem> {
    let mut items: Vec<OrderedItem> = instance
        .items
        .iter()
        .map(|item| {
            let mut incarnations: Vec<(u32, Vec<u32>)> = item
                .incarnations
                .iter()
                .map(|inc| (inc.variant, inc.weight.clone()))
                .collect();
            incarnations.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            OrderedItem {
                item: item.index,
                demand: item.demand,
                incarnations,
            }
        })
        .collect();
    items.sort_by(|a, b| {
        b.incarnations[0]
            .1
            .cmp(&a.incarnations[0].1)
            .then(a.item.cmp(&b.item))
    });
    items
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct State {
    /// Position in the construction order; `u32::MAX` marks the start state.
    pos: u32,
    /// Units of the item at `pos` taken so far.
    cnt: u32,
    /// Position of the last variant taken; later units may only use this or
    /// a later variant, which makes multiset enumeration canonical.
    jpos: u32,
    used: Vec<u32>,
}

/// The arc-flow graph for a single bin type.  Local node ids are a
/// topological order with the per-type source at 0 and target last; arcs
/// carry original 1-based (item, variant) labels, with (0, 0) for loss arcs.
pub struct TypeGraph {
    bin_type: u32,
    dims: usize,
    node_count: usize,
    arcs: Vec<(u32, u32, u32, u32)>,
}

impl TypeGraph {
    pub fn bin_type(&self) -> u32 {
        self.bin_type
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn num_nodes(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> usize {
        0
    }

    pub fn target(&self) -> usize {
        self.node_count - 1
    }

    /// Arcs as (tail, head, item, variant).
    pub fn arcs(&self) -> &[(u32, u32, u32, u32)] {
        &self.arcs
    }
}

/// A node-labeled DAG in topological order plus its arcs, fed through the
/// merging passes.  The per-type target is implicit: every node also
/// carries a loss arc to it.
struct StageDag {
    /// Nodes in topological order; `keys[v]` sorts arcs deterministically.
    order: Vec<u32>,
    out: Vec<Vec<(u32, u32, u32)>>,
}

/// Builds the arc-flow graph for bins of type `t` (1-based).  Paths from the
/// local source to the local target are exactly the multisets of
/// incarnations that fit the capacity with every item's multiplicity at most
/// its demand.  A capacity-zero bin yields the trivial loss-only graph.
pub fn build_type_graph(instance: &Instance, t: u32) -> Result<TypeGraph> {
    if t == 0 || t as usize > instance.num_bins() {
        return Err(Error::Graph(format!(
            "bin type {t} out of range 1..={}",
            instance.num_bins()
        )));
    }
    let capacity = &instance.bin(t).capacity;
    let dims = instance.dims;
    let order = construction_order(instance);

    let root = State {
        pos: u32::MAX,
        cnt: 0,
        jpos: 0,
        used: vec![0; dims],
    };
    let mut states: Vec<State> = vec![root.clone()];
    let mut state_ids: HashMap<State, u32> = HashMap::new();
    state_ids.insert(root, 0);
    // (tail state, head state, item, variant)
    let mut arcs: Vec<(u32, u32, u32, u32)> = Vec::new();

    let fits_after = |used: &[u32], w: &[u32]| -> Option<Vec<u32>> {
        let mut next = Vec::with_capacity(dims);
        for d in 0..dims {
            let sum = used[d] as u64 + w[d] as u64;
            if sum > capacity[d] as u64 {
                return None;
            }
            next.push(sum as u32);
        }
        Some(next)
    };

    let mut frontier = 0usize;
    while frontier < states.len() {
        let sid = frontier as u32;
        let state = states[frontier].clone();
        frontier += 1;

        let push = |states: &mut Vec<State>,
                    state_ids: &mut HashMap<State, u32>,
                    arcs: &mut Vec<(u32, u32, u32, u32)>,
                    next: State,
                    item: u32,
                    variant: u32|
         -> Result<()> {
            let head = match state_ids.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= STATE_BUDGET {
                        return Err(Error::Graph(format!(
                            "state budget of {STATE_BUDGET} exceeded while building the graph for bin type {t}"
                        )));
                    }
                    let id = states.len() as u32;
                    states.push(next.clone());
                    state_ids.insert(next, id);
                    id
                }
            };
            arcs.push((sid, head, item, variant));
            Ok(())
        };

        // Take one more unit of the current item.
        if state.pos != u32::MAX {
            let entry = &order[state.pos as usize];
            if (state.cnt as u64) < entry.demand {
                for j2 in state.jpos as usize..entry.incarnations.len() {
                    let (variant, ref weight) = entry.incarnations[j2];
                    if let Some(used) = fits_after(&state.used, weight) {
                        push(
                            &mut states,
                            &mut state_ids,
                            &mut arcs,
                            State {
                                pos: state.pos,
                                cnt: state.cnt + 1,
                                jpos: j2 as u32,
                                used,
                            },
                            entry.item,
                            variant,
                        )?;
                    }
                }
            }
        }
        // Open the block of a later item.
        let first_pos = if state.pos == u32::MAX {
            0
        } else {
            state.pos as usize + 1
        };
        for pos2 in first_pos..order.len() {
            let entry = &order[pos2];
            for (j2, (variant, weight)) in entry.incarnations.iter().enumerate() {
                if let Some(used) = fits_after(&state.used, weight) {
                    push(
                        &mut states,
                        &mut state_ids,
                        &mut arcs,
                        State {
                            pos: pos2 as u32,
                            cnt: 1,
                            jpos: j2 as u32,
                            used,
                        },
                        entry.item,
                        *variant,
                    )?;
                }
            }
        }
    }

    let stage = lift_states(instance, dims, &states, &arcs);
    Ok(reduce_suffixes(t, dims, stage))
}

/// First pass: relabel states with their per-dimension longest completion
/// and merge states sharing (position, count, completion label).
fn lift_states(
    instance: &Instance,
    dims: usize,
    states: &[State],
    arcs: &[(u32, u32, u32, u32)],
) -> StageDag {
    let n = states.len();
    let mut out: Vec<Vec<(u32, u32, u32)>> = vec![Vec::new(); n];
    for &(tail, head, item, variant) in arcs {
        out[tail as usize].push((head, item, variant));
    }

    // (pos, cnt, jpos, used) ascending is a topological order with the
    // start state first; `pos == u32::MAX` sorts as "before everything".
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        let key = |sid: u32| {
            let s = &states[sid as usize];
            let pos = if s.pos == u32::MAX { -1 } else { s.pos as i64 };
            (pos, s.cnt, s.jpos)
        };
        key(a).cmp(&key(b)).then_with(|| {
            states[a as usize].used.cmp(&states[b as usize].used)
        })
    });

    // Longest completion per dimension, over the implicit-loss-terminated
    // suffix paths.
    let mut reach: Vec<Vec<u64>> = vec![vec![0; dims]; n];
    for &sid in order.iter().rev() {
        let mut best = vec![0u64; dims];
        for &(head, item, variant) in &out[sid as usize] {
            let weight = instance.weight(item, variant);
            for d in 0..dims {
                best[d] = best[d].max(reach[head as usize][d] + weight[d] as u64);
            }
        }
        reach[sid as usize] = best;
    }

    // Merge key: block position, units taken, completion label.
    let mut class_of: Vec<u32> = vec![u32::MAX; n];
    let mut classes: HashMap<(u32, u32, Vec<u64>), u32> = HashMap::new();
    let mut class_order: Vec<u32> = Vec::new();
    for &sid in &order {
        let s = &states[sid as usize];
        let key = (s.pos, s.cnt, reach[sid as usize].clone());
        let next_id = class_order.len() as u32;
        let class = *classes.entry(key).or_insert_with(|| {
            class_order.push(next_id);
            next_id
        });
        class_of[sid as usize] = class;
    }

    // Quotient arcs.  Arcs advance (pos, cnt) strictly, so the classes
    // inherit acyclicity and first-seen order is topological.
    let k = class_order.len();
    let mut class_out: Vec<Vec<(u32, u32, u32)>> = vec![Vec::new(); k];
    for (sid, state_arcs) in out.iter().enumerate() {
        let tail = class_of[sid] as usize;
        for &(head, item, variant) in state_arcs {
            class_out[tail].push((class_of[head as usize], item, variant));
        }
    }
    for arcs in &mut class_out {
        arcs.sort_unstable();
        arcs.dedup();
    }
    StageDag {
        order: (0..k as u32).collect(),
        out: class_out,
    }
}

/// Second pass: merge nodes whose sets of completions coincide.  Classes
/// are assigned in reverse topological order, so the class signature of a
/// node only refers to already-numbered classes; class arcs therefore
/// always point to strictly smaller ids and the quotient stays acyclic.
fn reduce_suffixes(bin_type: u32, dims: usize, stage: StageDag) -> TypeGraph {
    let n = stage.out.len();
    // Class 0 is the per-type target reached by the implicit loss arcs.
    let mut class_of: Vec<u32> = vec![0; n];
    let mut signatures: HashMap<Vec<(u32, u32, u32)>, u32> = HashMap::new();
    let mut class_sigs: Vec<Vec<(u32, u32, u32)>> = vec![Vec::new()];
    for &sid in stage.order.iter().rev() {
        let mut sig: Vec<(u32, u32, u32)> = stage.out[sid as usize]
            .iter()
            .map(|&(head, item, variant)| (item, variant, class_of[head as usize]))
            .collect();
        sig.sort_unstable();
        sig.dedup();
        let next_id = class_sigs.len() as u32;
        let class = *signatures.entry(sig.clone()).or_insert_with(|| {
            class_sigs.push(sig);
            next_id
        });
        class_of[sid as usize] = class;
    }

    let num_classes = class_sigs.len();
    let source_class = class_of[stage.order[0] as usize] as usize;
    // The start node is processed last and every class is reachable from
    // it, so its class id is the maximum.
    debug_assert_eq!(source_class, num_classes - 1);

    // Flip ids so the source becomes 0 and the target the last node, giving
    // a topological numbering.
    let node_count = num_classes;
    let flip = |class: usize| -> u32 { (num_classes - 1 - class) as u32 };
    let target_id = (node_count - 1) as u32;
    let mut graph_arcs: Vec<(u32, u32, u32, u32)> = Vec::new();
    for (class, sig) in class_sigs.iter().enumerate().skip(1) {
        let tail = flip(class);
        for &(item, variant, head_class) in sig {
            graph_arcs.push((tail, flip(head_class as usize), item, variant));
        }
        // Loss arc: stopping here completes the pattern.
        graph_arcs.push((tail, target_id, 0, 0));
    }
    graph_arcs.sort_unstable();
    graph_arcs.dedup();

    TypeGraph {
        bin_type,
        dims,
        node_count,
        arcs: graph_arcs,
    }
}
