//! Deterministic DOT and JSON renderings of a graph.

use std::fmt::Write;

use serde::Serialize;

use super::{ArcFlowGraph, NodeKind};

fn node_name(graph: &ArcFlowGraph, idx: usize) -> String {
    let id = super::NodeId(idx as u32);
    if id == graph.source() {
        return "S".into();
    }
    if id == graph.target() {
        return "T".into();
    }
    if let Some(t) = graph.component(id) {
        if graph.type_source(t).ok() == Some(id) {
            return format!("S{t}");
        }
        if graph.type_target(t).ok() == Some(id) {
            return format!("T{t}");
        }
    }
    format!("v{idx}")
}

/// Renders the graph in DOT, one cluster per bin type, loss arcs dashed,
/// nodes annotated with their longest-path labels when available.  Output is
/// byte-stable for a given graph.
pub fn export_dot(graph: &ArcFlowGraph) -> String {
    let mut out = String::new();
    out.push_str("digraph arcflow {\n  rankdir=LR;\n  node [shape=circle];\n");
    let label_of = |idx: usize| -> String {
        let name = node_name(graph, idx);
        match graph.node_labels() {
            Some(labels) => {
                let entries: Vec<String> =
                    labels[idx].iter().map(|v| v.to_string()).collect();
                format!("{name}\\n({})", entries.join(","))
            }
            None => name,
        }
    };
    for &t in graph.bin_types() {
        let _ = writeln!(out, "  subgraph cluster_type_{t} {{");
        let _ = writeln!(out, "    label=\"bin type {t}\";");
        for idx in 0..graph.num_nodes() {
            if graph.component(super::NodeId(idx as u32)) == Some(t) {
                let _ = writeln!(out, "    n{idx} [label=\"{}\"];", label_of(idx));
            }
        }
        out.push_str("  }\n");
    }
    let _ = writeln!(out, "  n0 [label=\"{}\"];", label_of(0));
    let last = graph.num_nodes() - 1;
    let _ = writeln!(out, "  n{last} [label=\"{}\"];", label_of(last));
    for arc in graph.arcs() {
        if arc.label.is_loss() {
            let _ = writeln!(
                out,
                "  n{} -> n{} [style=dashed,label=\"loss\"];",
                arc.tail.0, arc.head.0
            );
        } else {
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"{}.{}\"];",
                arc.tail.0, arc.head.0, arc.label.item, arc.label.variant
            );
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct JsonNode {
    id: u32,
    #[serde(flatten)]
    kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi: Option<Vec<u64>>,
}

#[derive(Serialize)]
struct JsonArc {
    tail: u32,
    head: u32,
    item: u32,
    variant: u32,
}

#[derive(Serialize)]
struct JsonGraph {
    dims: usize,
    nodes: Vec<JsonNode>,
    arcs: Vec<JsonArc>,
    type_sources: Vec<(u32, u32)>,
    type_targets: Vec<(u32, u32)>,
}

/// JSON dump with stable ordering: nodes by id, arcs in their canonical
/// sorted order.
pub fn export_json(graph: &ArcFlowGraph) -> String {
    let nodes = (0..graph.num_nodes())
        .map(|idx| JsonNode {
            id: idx as u32,
            kind: graph.node_kind(super::NodeId(idx as u32)),
            psi: graph.node_labels().map(|l| l[idx].clone()),
        })
        .collect();
    let arcs = graph
        .arcs()
        .iter()
        .map(|arc| JsonArc {
            tail: arc.tail.0,
            head: arc.head.0,
            item: arc.label.item,
            variant: arc.label.variant,
        })
        .collect();
    let doc = JsonGraph {
        dims: graph.dims(),
        nodes,
        arcs,
        type_sources: graph
            .bin_types()
            .iter()
            .map(|&t| (t, graph.type_source(t).unwrap().0))
            .collect(),
        type_targets: graph
            .bin_types()
            .iter()
            .map(|&t| (t, graph.type_target(t).unwrap().0))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("graph serializes")
}
