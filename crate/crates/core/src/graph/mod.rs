//! Arc-flow graphs: one DAG per bin type whose source-to-target paths are
//! exactly the valid packing patterns, stitched together under a super
//! source and super target, then shrunk by a final relabeling step.

mod build;
mod compress;
mod export;
mod patterns;

pub use build::{build_type_graph, TypeGraph};
pub use compress::compress_final;
pub use export::{export_dot, export_json};
pub use patterns::{
    enumerate_patterns, enumerate_patterns_with_witness, Pattern, PatternSet, DEFAULT_PATH_CAP,
};

use serde::Serialize;

use crate::error::{Error, Result};

/// Index of a node in an [`ArcFlowGraph`].  Node ids form a topological
/// order: every arc goes from a smaller id to a larger one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// What a node is.  Per-type sources and targets are ordinary inner nodes
/// tagged with their bin type; only the super source and super target are
/// special.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NodeKind {
    Source,
    Target,
    Inner { bin_type: u32 },
}

/// Arc label: an item incarnation, or the zero-weight loss label (0, 0)
/// used for loss arcs and the super source/target connectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ArcLabel {
    pub item: u32,
    pub variant: u32,
}

impl ArcLabel {
    pub const LOSS: ArcLabel = ArcLabel {
        item: 0,
        variant: 0,
    };

    pub fn is_loss(self) -> bool {
        self.item == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub label: ArcLabel,
}

/// Vertex/arc counts after the final compression step, plus the share of
/// vertices and arcs that step removed from the stitched graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphStats {
    pub num_vertices: usize,
    pub num_arcs: usize,
    pub pct_vertices_removed: f64,
    pub pct_arcs_removed: f64,
}

/// A stitched arc-flow graph over all bin types.
#[derive(Debug, Clone)]
pub struct ArcFlowGraph {
    dims: usize,
    node_kinds: Vec<NodeKind>,
    arcs: Vec<Arc>,
    bin_types: Vec<u32>,
    type_sources: Vec<NodeId>,
    type_targets: Vec<NodeId>,
    psi: Option<Vec<Vec<u64>>>,
}

impl ArcFlowGraph {
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn num_nodes(&self) -> usize {
        self.node_kinds.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn node_kind(&self, node: NodeId) -> NodeKind {
        self.node_kinds[node.idx()]
    }

    pub fn source(&self) -> NodeId {
        NodeId(0)
    }

    pub fn target(&self) -> NodeId {
        NodeId((self.node_kinds.len() - 1) as u32)
    }

    /// Bin types present, ascending.
    pub fn bin_types(&self) -> &[u32] {
        &self.bin_types
    }

    pub fn type_source(&self, bin_type: u32) -> Result<NodeId> {
        self.type_pos(bin_type).map(|p| self.type_sources[p])
    }

    pub fn type_target(&self, bin_type: u32) -> Result<NodeId> {
        self.type_pos(bin_type).map(|p| self.type_targets[p])
    }

    fn type_pos(&self, bin_type: u32) -> Result<usize> {
        self.bin_types
            .binary_search(&bin_type)
            .map_err(|_| Error::Graph(format!("graph has no component for bin type {bin_type}")))
    }

    /// Longest-path labels if the final compression step assigned them.
    pub fn node_labels(&self) -> Option<&[Vec<u64>]> {
        self.psi.as_deref()
    }

    /// Arc indices leaving each node.
    pub fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes()];
        for (idx, arc) in self.arcs.iter().enumerate() {
            adj[arc.tail.idx()].push(idx);
        }
        adj
    }

    /// Arc indices entering each node.
    pub fn in_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes()];
        for (idx, arc) in self.arcs.iter().enumerate() {
            adj[arc.head.idx()].push(idx);
        }
        adj
    }

    /// Bin type of the component a node belongs to; `None` for the super
    /// source and target.
    pub fn component(&self, node: NodeId) -> Option<u32> {
        match self.node_kind(node) {
            NodeKind::Inner { bin_type } => Some(bin_type),
            _ => None,
        }
    }

    /// Checks the structural invariants: ids are a topological order, the
    /// super source has no in-arcs, the super target no out-arcs, arcs stay
    /// within one component, and every node lies on a source-target path.
    pub fn check_structure(&self) -> Result<()> {
        let n = self.num_nodes();
        if n < 2 {
            return Err(Error::Graph("graph needs at least source and target".into()));
        }
        for arc in &self.arcs {
            if arc.tail >= arc.head {
                return Err(Error::Graph(format!(
                    "arc {} -> {} breaks the topological numbering",
                    arc.tail, arc.head
                )));
            }
            if arc.head == self.source() || arc.tail == self.target() {
                return Err(Error::Graph(
                    "super source has an in-arc or super target an out-arc".into(),
                ));
            }
            let tail_comp = self.component(arc.tail);
            let head_comp = self.component(arc.head);
            match (tail_comp, head_comp) {
                (Some(a), Some(b)) if a != b => {
                    return Err(Error::Graph(format!(
                        "arc {} -> {} crosses components {} and {}",
                        arc.tail, arc.head, a, b
                    )));
                }
                _ => {}
            }
        }
        // Reachability in both directions.
        let mut from_source = vec![false; n];
        from_source[0] = true;
        for arc in &self.arcs {
            if from_source[arc.tail.idx()] {
                from_source[arc.head.idx()] = true;
            }
        }
        let mut to_target = vec![false; n];
        to_target[n - 1] = true;
        for arc in self.arcs.iter().rev() {
            if to_target[arc.head.idx()] {
                to_target[arc.tail.idx()] = true;
            }
        }
        for v in 0..n {
            if !from_source[v] || !to_target[v] {
                return Err(Error::Graph(format!("node {v} lies on no source-target path")));
            }
        }
        Ok(())
    }
}

/// Connects per-type graphs under a super source and super target with
/// loss-labeled connector arcs.
pub fn stitch(graphs: Vec<TypeGraph>) -> Result<ArcFlowGraph> {
    if graphs.is_empty() {
        return Err(Error::Graph("no bin types".into()));
    }
    let mut graphs = graphs;
    graphs.sort_by_key(|g| g.bin_type());
    for pair in graphs.windows(2) {
        if pair[0].bin_type() == pair[1].bin_type() {
            return Err(Error::Graph(format!(
                "two graphs for bin type {}",
                pair[0].bin_type()
            )));
        }
    }
    let dims = graphs[0].dims();
    if graphs.iter().any(|g| g.dims() != dims) {
        return Err(Error::Graph("per-type graphs disagree on dimensions".into()));
    }

    let total_inner: usize = graphs.iter().map(|g| g.num_nodes()).sum();
    let n = total_inner + 2;
    let mut node_kinds = Vec::with_capacity(n);
    node_kinds.push(NodeKind::Source);
    let mut arcs = Vec::new();
    let mut bin_types = Vec::with_capacity(graphs.len());
    let mut type_sources = Vec::with_capacity(graphs.len());
    let mut type_targets = Vec::with_capacity(graphs.len());
    let target = NodeId((n - 1) as u32);

    let mut offset = 1u32;
    for g in &graphs {
        let t = g.bin_type();
        for _ in 0..g.num_nodes() {
            node_kinds.push(NodeKind::Inner { bin_type: t });
        }
        let s_t = NodeId(offset + g.source() as u32);
        let t_t = NodeId(offset + g.target() as u32);
        arcs.push(Arc {
            tail: NodeId(0),
            head: s_t,
            label: ArcLabel::LOSS,
        });
        arcs.push(Arc {
            tail: t_t,
            head: target,
            label: ArcLabel::LOSS,
        });
        for &(tail, head, item, variant) in g.arcs() {
            arcs.push(Arc {
                tail: NodeId(offset + tail as u32),
                head: NodeId(offset + head as u32),
                label: ArcLabel { item, variant },
            });
        }
        bin_types.push(t);
        type_sources.push(s_t);
        type_targets.push(t_t);
        offset += g.num_nodes() as u32;
    }
    node_kinds.push(NodeKind::Target);
    arcs.sort();

    let graph = ArcFlowGraph {
        dims,
        node_kinds,
        arcs,
        bin_types,
        type_sources,
        type_targets,
        psi: None,
    };
    graph.check_structure()?;
    Ok(graph)
}

/// Longest-path labels from the super source, one entry per dimension:
/// `psi[S] = 0` and `psi[v] = max over in-arcs (u, v, l) of psi[u] + w(l)`.
/// Loss and connector arcs contribute weight zero.
pub fn psi_labels(graph: &ArcFlowGraph, instance: &crate::instance::Instance) -> Vec<Vec<u64>> {
    let dims = graph.dims();
    let mut psi = vec![vec![0u64; dims]; graph.num_nodes()];
    // Node ids are topologically ordered, so a single pass over arcs sorted
    // by head would do; arcs sorted by tail work just as well because the
    // tail's label is final before any of its out-arcs are seen.
    for arc in graph.arcs() {
        let tail_psi = psi[arc.tail.idx()].clone();
        let head = &mut psi[arc.head.idx()];
        if arc.label.is_loss() {
            for d in 0..dims {
                head[d] = head[d].max(tail_psi[d]);
            }
        } else {
            let w = instance.weight(arc.label.item, arc.label.variant);
            for d in 0..dims {
                head[d] = head[d].max(tail_psi[d] + w[d] as u64);
            }
        }
    }
    psi
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::instance::{parse_instance, Instance};

    pub(crate) fn sample_instance() -> Instance {
        parse_instance(
            "2\n2\n3 100 75\n2 75 50\n2\n2 1\n  75 50\n1 2\n  40 15\n  25 25\n",
        )
        .unwrap()
    }

    fn sample_graph() -> ArcFlowGraph {
        let inst = sample_instance();
        let graphs = (1..=2)
            .map(|t| build_type_graph(&inst, t).unwrap())
            .collect();
        stitch(graphs).unwrap()
    }

    #[test]
    fn stitch_of_nothing_fails() {
        let err = stitch(Vec::new()).unwrap_err();
        assert!(err.to_string().contains("no bin types"));
    }

    #[test]
    fn single_type_adds_two_connectors() {
        let inst = parse_instance("1\n1\n1 1\n1\n1 1\n  1\n").unwrap();
        let g1 = build_type_graph(&inst, 1).unwrap();
        let inner_arcs = g1.arcs().len();
        let stitched = stitch(vec![g1]).unwrap();
        assert_eq!(stitched.num_arcs(), inner_arcs + 2);
        assert_eq!(stitched.bin_types(), &[1]);
    }

    #[test]
    fn every_path_crosses_one_type_source() {
        let g = sample_graph();
        // All arcs out of the super source are connectors to type sources.
        let adj = g.out_adjacency();
        for &arc_idx in &adj[0] {
            let arc = g.arcs()[arc_idx];
            assert!(arc.label.is_loss());
            let comp = g.component(arc.head).unwrap();
            assert_eq!(g.type_source(comp).unwrap(), arc.head);
        }
        g.check_structure().unwrap();
    }

    #[test]
    fn psi_base_case_and_example_values() {
        let inst = sample_instance();
        let g = sample_graph();
        let psi = psi_labels(&g, &inst);
        assert_eq!(psi[g.source().idx()], vec![0, 0]);
        for t in [1, 2] {
            let s_t = g.type_source(t).unwrap();
            assert_eq!(psi[s_t.idx()], vec![0, 0]);
        }
        // A node reached only through the weight (75, 50) incarnation gets
        // exactly that label.
        let s1 = g.type_source(1).unwrap();
        let adj = g.out_adjacency();
        let item1_arc = adj[s1.idx()]
            .iter()
            .map(|&i| g.arcs()[i])
            .find(|a| a.label == ArcLabel { item: 1, variant: 1 })
            .unwrap();
        assert_eq!(psi[item1_arc.head.idx()], vec![75, 50]);
    }

    #[test]
    fn psi_is_componentwise_max_over_in_arcs() {
        let inst = sample_instance();
        let g = sample_graph();
        let psi = psi_labels(&g, &inst);
        let in_adj = g.in_adjacency();
        for v in 0..g.num_nodes() {
            if v == 0 {
                continue;
            }
            for d in 0..g.dims() {
                let expected = in_adj[v]
                    .iter()
                    .map(|&i| {
                        let arc = g.arcs()[i];
                        let w = if arc.label.is_loss() {
                            0
                        } else {
                            inst.weight(arc.label.item, arc.label.variant)[d] as u64
                        };
                        psi[arc.tail.idx()][d] + w
                    })
                    .max()
                    .unwrap();
                assert_eq!(psi[v][d], expected);
            }
        }
    }
}
