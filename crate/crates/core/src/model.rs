//! The integer flow model over a compressed graph.
//!
//! One integer variable per arc plus the circulation variable `z` feeding
//! the target back to the source.  Conservation holds at every node with
//! `-z` at the super source and `+z` at the super target; item demands are
//! covered by the flow on their arcs, with equality for the items in the
//! `J` set and at-least otherwise; item arcs are capped at their item's
//! demand.  The objective charges each bin type's cost on its
//! target-connector arc.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Arc, ArcFlowGraph};
use crate::instance::{Cost, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowSense {
    Eq,
    Ge,
}

/// A symbolic row: `sum(coeff * var) sense rhs`.  Variable indices `0..a`
/// are arc flows, index `a` is `z`.
#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    pub sense: RowSense,
    pub rhs: u64,
    pub terms: Vec<(usize, i64)>,
}

/// One flow variable; `upper` is the item's demand for item arcs and
/// absent for loss and connector arcs.
#[derive(Debug, Clone)]
pub struct FlowVar {
    pub arc: Arc,
    pub upper: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct FlowModel {
    vars: Vec<FlowVar>,
    num_nodes: usize,
    /// (arc variable, bin type cost) for each target connector.
    objective: Vec<(usize, Cost)>,
    demands: Vec<(u32, RowSense, u64)>,
    j_set: BTreeSet<u32>,
}

impl FlowModel {
    /// Arc variables plus `z`.
    pub fn num_vars(&self) -> usize {
        self.vars.len() + 1
    }

    /// Conservation rows plus demand rows.
    pub fn num_rows(&self) -> usize {
        self.num_nodes + self.demands.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.vars.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Index of the `z` variable.
    pub fn z_var(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[FlowVar] {
        &self.vars
    }

    pub fn objective(&self) -> &[(usize, Cost)] {
        &self.objective
    }

    pub fn j_set(&self) -> &BTreeSet<u32> {
        &self.j_set
    }

    pub fn demand_rows(&self) -> &[(u32, RowSense, u64)] {
        &self.demands
    }

    pub fn var_name(&self, var: usize) -> String {
        if var == self.z_var() {
            "z".into()
        } else {
            let arc = &self.vars[var].arc;
            format!(
                "f_{}_{}_{}_{}",
                arc.tail.0, arc.head.0, arc.label.item, arc.label.variant
            )
        }
    }

    /// All rows in a fixed order: conservation per node, then demand per
    /// item.
    pub fn rows(&self) -> Vec<Row> {
        let mut rows = Vec::with_capacity(self.num_rows());
        let source = 0usize;
        let target = self.num_nodes - 1;
        let mut terms: Vec<Vec<(usize, i64)>> = vec![Vec::new(); self.num_nodes];
        for (idx, var) in self.vars.iter().enumerate() {
            terms[var.arc.head.idx()].push((idx, 1));
            terms[var.arc.tail.idx()].push((idx, -1));
        }
        for (node, mut node_terms) in terms.into_iter().enumerate() {
            if node == source {
                node_terms.push((self.z_var(), 1));
            } else if node == target {
                node_terms.push((self.z_var(), -1));
            }
            node_terms.sort_by_key(|&(var, _)| var);
            rows.push(Row {
                name: format!("cons_{node}"),
                sense: RowSense::Eq,
                rhs: 0,
                terms: node_terms,
            });
        }
        for &(item, sense, rhs) in &self.demands {
            let terms: Vec<(usize, i64)> = self
                .vars
                .iter()
                .enumerate()
                .filter(|(_, v)| v.arc.label.item == item)
                .map(|(idx, _)| (idx, 1))
                .collect();
            rows.push(Row {
                name: format!("dem_{item}"),
                sense,
                rhs,
                terms,
            });
        }
        rows
    }
}

/// The items whose demand must be met exactly: those with demand one.
pub fn default_j(instance: &Instance) -> BTreeSet<u32> {
    instance
        .items
        .iter()
        .filter(|item| item.demand == 1)
        .map(|item| item.index)
        .collect()
}

/// Assembles the flow model for a stitched (typically compressed) graph.
pub fn assemble(
    graph: &ArcFlowGraph,
    instance: &Instance,
    j_set: &BTreeSet<u32>,
) -> Result<FlowModel> {
    for &item in j_set {
        if item == 0 || item as usize > instance.num_items() {
            return Err(Error::Model(format!(
                "J contains item {item}, instance has items 1..={}",
                instance.num_items()
            )));
        }
    }
    let vars: Vec<FlowVar> = graph
        .arcs()
        .iter()
        .map(|&arc| FlowVar {
            arc,
            upper: if arc.label.is_loss() {
                None
            } else {
                Some(instance.item(arc.label.item).demand)
            },
        })
        .collect();
    // Every demanded item needs at least one arc, otherwise no flow can
    // cover it.
    for item in &instance.items {
        let has_arc = vars.iter().any(|v| v.arc.label.item == item.index);
        if !has_arc {
            return Err(Error::Infeasible(format!(
                "item {} has no arc in the graph; its demand cannot be met",
                item.index
            )));
        }
    }
    let target = graph.target();
    let mut objective = Vec::new();
    for &t in graph.bin_types() {
        let t_t = graph.type_target(t)?;
        let connector = vars
            .iter()
            .position(|v| v.arc.tail == t_t && v.arc.head == target && v.arc.label.is_loss())
            .ok_or_else(|| Error::Model(format!("missing target connector for bin type {t}")))?;
        objective.push((connector, instance.bin(t).cost.clone()));
    }
    let demands = instance
        .items
        .iter()
        .map(|item| {
            let sense = if j_set.contains(&item.index) {
                RowSense::Eq
            } else {
                RowSense::Ge
            };
            (item.index, sense, item.demand)
        })
        .collect();
    Ok(FlowModel {
        vars,
        num_nodes: graph.num_nodes(),
        objective,
        demands,
        j_set: j_set.clone(),
    })
}

fn cost_coeff(cost: &Cost) -> String {
    if cost.denom() == &1 {
        cost.numer().to_string()
    } else {
        let value = *cost.numer() as f64 / *cost.denom() as f64;
        format!("{value}")
    }
}

/// Emits the model in the LP interchange format, byte-stable per model.
pub fn emit_lp(model: &FlowModel) -> String {
    let mut out = String::new();
    out.push_str("Minimize\n obj:");
    for (pos, (var, cost)) in model.objective().iter().enumerate() {
        if pos > 0 {
            out.push_str(" +");
        }
        out.push_str(&format!(" {} {}", cost_coeff(cost), model.var_name(*var)));
    }
    out.push_str("\nSubject To\n");
    for row in model.rows() {
        out.push_str(&format!(" {}:", row.name));
        for (pos, &(var, coeff)) in row.terms.iter().enumerate() {
            let sign = if coeff < 0 {
                "-"
            } else if pos == 0 {
                ""
            } else {
                "+"
            };
            if pos > 0 || coeff < 0 {
                out.push_str(&format!(" {sign}"));
            }
            out.push_str(&format!(" {}", model.var_name(var)));
            if pos % 12 == 11 {
                out.push_str("\n   ");
            }
        }
        let op = match row.sense {
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        };
        out.push_str(&format!(" {op} {}\n", row.rhs));
    }
    out.push_str("Bounds\n");
    for (idx, var) in model.vars().iter().enumerate() {
        if let Some(upper) = var.upper {
            out.push_str(&format!(" 0 <= {} <= {upper}\n", model.var_name(idx)));
        }
    }
    out.push_str("Generals\n");
    for idx in 0..model.num_vars() {
        out.push_str(&format!(" {}", model.var_name(idx)));
        if idx % 12 == 11 {
            out.push('\n');
        }
    }
    if model.num_vars() % 12 != 0 {
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

#[derive(Serialize)]
struct JsonTerm {
    var: usize,
    coeff: i64,
}

#[derive(Serialize)]
struct JsonRow {
    name: String,
    sense: RowSense,
    rhs: u64,
    terms: Vec<JsonTerm>,
}

#[derive(Serialize)]
struct JsonModel {
    num_vars: usize,
    var_names: Vec<String>,
    objective: Vec<(usize, i64, i64)>,
    rows: Vec<JsonRow>,
    upper_bounds: Vec<(usize, u64)>,
}

/// JSON dump of the model: objective, rows, bounds.
pub fn emit_json(model: &FlowModel) -> String {
    let doc = JsonModel {
        num_vars: model.num_vars(),
        var_names: (0..model.num_vars()).map(|v| model.var_name(v)).collect(),
        objective: model
            .objective()
            .iter()
            .map(|(var, cost)| (*var, *cost.numer(), *cost.denom()))
            .collect(),
        rows: model
            .rows()
            .into_iter()
            .map(|row| JsonRow {
                name: row.name,
                sense: row.sense,
                rhs: row.rhs,
                terms: row
                    .terms
                    .into_iter()
                    .map(|(var, coeff)| JsonTerm { var, coeff })
                    .collect(),
            })
            .collect(),
        upper_bounds: model
            .vars()
            .iter()
            .enumerate()
            .filter_map(|(idx, v)| v.upper.map(|u| (idx, u)))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("model serializes")
}

/// Exact verification of an integral candidate against every model row;
/// returns the exact objective on success.
pub fn verify_solution(model: &FlowModel, flows: &[u64], z: u64) -> Result<Cost> {
    if flows.len() != model.num_arcs() {
        return Err(Error::InvalidSolution(format!(
            "expected {} flow values, got {}",
            model.num_arcs(),
            flows.len()
        )));
    }
    for (idx, var) in model.vars().iter().enumerate() {
        if let Some(upper) = var.upper {
            if flows[idx] > upper {
                return Err(Error::InvalidSolution(format!(
                    "flow {} on {} exceeds its bound {}",
                    flows[idx],
                    model.var_name(idx),
                    upper
                )));
            }
        }
    }
    let value = |var: usize| -> i128 {
        if var == model.z_var() {
            z as i128
        } else {
            flows[var] as i128
        }
    };
    for row in model.rows() {
        let lhs: i128 = row.terms.iter().map(|&(var, c)| c as i128 * value(var)).sum();
        let ok = match row.sense {
            RowSense::Eq => lhs == row.rhs as i128,
            RowSense::Ge => lhs >= row.rhs as i128,
        };
        if !ok {
            return Err(Error::InvalidSolution(format!(
                "row {} violated: lhs {} {} rhs {}",
                row.name,
                lhs,
                match row.sense {
                    RowSense::Eq => "!=",
                    RowSense::Ge => "<",
                },
                row.rhs
            )));
        }
    }
    let mut objective = Cost::zero();
    for (var, cost) in model.objective() {
        let f = i64::try_from(flows[*var])
            .map_err(|_| Error::InvalidSolution("connector flow overflows".into()))?;
        objective += cost * Cost::from_integer(f);
    }
    Ok(objective)
}
