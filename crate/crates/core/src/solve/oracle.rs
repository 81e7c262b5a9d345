//! Exhaustive ground-truth solver for tiny instances.
//!
//! Every demanded unit is assigned an incarnation and a bin slot by
//! depth-first search with cost-bound pruning.  Deliberately independent of
//! the graph and model machinery so it can vouch for them.

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{enumerate_patterns_with_witness, ArcFlowGraph};
use crate::instance::{Cost, Instance};
use crate::model::{verify_solution, FlowModel};
use crate::solve::{flows_from_paths, SolveReport, SolveStatus};

/// Refuse instances with more demanded units than this.
pub const ORACLE_UNIT_LIMIT: u64 = 10;

/// One bin of the oracle's best assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleBin {
    pub bin_type: u32,
    pub contents: Vec<(u32, u32)>,
}

struct Search<'a> {
    instance: &'a Instance,
    units: Vec<u32>,
    /// Cheapest volume-per-cost over bin types, per dimension.
    best_value: Vec<Ratio<i64>>,
    best_cost: Option<Cost>,
    best_bins: Vec<OracleBin>,
    bins: Vec<(u32, Vec<u32>, Vec<(u32, u32)>)>,
    current_cost: Cost,
}

impl<'a> Search<'a> {
    /// Cost needed to carry the remaining units, by the best single
    /// dimension volume argument.
    fn remaining_bound(&self, from_unit: usize) -> Cost {
        let dims = self.instance.dims;
        let mut bound = Cost::zero();
        for d in 0..dims {
            if self.best_value[d].is_zero() {
                continue;
            }
            let volume: u64 = self.units[from_unit..]
                .iter()
                .map(|&item| {
                    self.instance
                        .item(item)
                        .incarnations
                        .iter()
                        .map(|inc| inc.weight[d] as u64)
                        .min()
                        .unwrap()
                })
                .sum();
            // Open bins still have room; subtract it before charging.
            let slack: u64 = self
                .bins
                .iter()
                .map(|(t, used, _)| {
                    let cap = self.instance.bin(*t).capacity[d];
                    (cap - used[d]) as u64
                })
                .sum();
            let net = volume.saturating_sub(slack);
            let dim_bound = Ratio::from_integer(net as i64) / self.best_value[d].clone();
            if dim_bound > bound {
                bound = dim_bound;
            }
        }
        bound
    }

    fn search(&mut self, unit: usize) {
        if unit == self.units.len() {
            let better = match &self.best_cost {
                None => true,
                Some(best) => self.current_cost < *best,
            };
            if better {
                self.best_cost = Some(self.current_cost.clone());
                self.best_bins = self
                    .bins
                    .iter()
                    .map(|(t, _, contents)| OracleBin {
                        bin_type: *t,
                        contents: contents.clone(),
                    })
                    .collect();
            }
            return;
        }
        if let Some(best) = &self.best_cost {
            if &(self.current_cost.clone() + self.remaining_bound(unit)) >= &best.clone() {
                return;
            }
        }
        let item = self.units[unit];
        let incarnations = &self.instance.item(item).incarnations;

        // Existing bins; skip a bin identical to an earlier one.
        for slot in 0..self.bins.len() {
            let (bin_type, used) = (self.bins[slot].0, self.bins[slot].1.clone());
            let duplicate = self.bins[..slot]
                .iter()
                .any(|(t, u, _)| *t == bin_type && *u == used);
            if duplicate {
                continue;
            }
            self.try_placements(unit, item, incarnations.len(), Some(slot));
        }
        // A fresh bin of each type.
        for t in 1..=self.instance.num_bins() as u32 {
            self.bins.push((t, vec![0; self.instance.dims], Vec::new()));
            self.try_placements(unit, item, incarnations.len(), None);
            self.bins.pop();
        }
    }

    fn try_placements(&mut self, unit: usize, item: u32, num_incs: usize, slot: Option<usize>) {
        let slot = slot.unwrap_or(self.bins.len() - 1);
        let fresh = self.bins[slot].2.is_empty();
        let mut tried: Vec<&[u32]> = Vec::new();
        for j in 1..=num_incs as u32 {
            let weight = self.instance.weight(item, j);
            // A lighter-everywhere incarnation already tried dominates.
            if tried
                .iter()
                .any(|w| w.iter().zip(weight).all(|(a, b)| a <= b))
            {
                continue;
            }
            let (bin_type, used, _) = &self.bins[slot];
            let capacity = &self.instance.bin(*bin_type).capacity;
            let next: Option<Vec<u32>> = {
                let mut v = Vec::with_capacity(used.len());
                let mut ok = true;
                for d in 0..used.len() {
                    let sum = used[d] as u64 + weight[d] as u64;
                    if sum > capacity[d] as u64 {
                        ok = false;
                        break;
                    }
                    v.push(sum as u32);
                }
                ok.then_some(v)
            };
            let Some(next_used) = next else { continue };
            tried.push(weight);
            let old_used = std::mem::replace(&mut self.bins[slot].1, next_used);
            self.bins[slot].2.push((item, j));
            let cost_added = if fresh {
                let c = self.instance.bin(self.bins[slot].0).cost.clone();
                self.current_cost += c.clone();
                Some(c)
            } else {
                None
            };
            self.search(unit + 1);
            if let Some(c) = cost_added {
                self.current_cost -= c;
            }
            self.bins[slot].2.pop();
            self.bins[slot].1 = old_used;
        }
    }
}

/// Minimal total cost by exhaustive search; refuses more than
/// [`ORACLE_UNIT_LIMIT`] units.
pub fn solve_oracle(instance: &Instance) -> Result<Cost> {
    solve_oracle_bins(instance).map(|(cost, _)| cost)
}

/// Exhaustive search returning the best bins as well.
pub fn solve_oracle_bins(instance: &Instance) -> Result<(Cost, Vec<OracleBin>)> {
    let n = instance.total_items();
    if n > ORACLE_UNIT_LIMIT {
        return Err(Error::Solver(format!(
            "oracle refuses instances with more than {ORACLE_UNIT_LIMIT} units (got {n})"
        )));
    }
    if instance.num_items() > 0 && instance.num_bins() == 0 {
        return Err(Error::Infeasible("no bin types".into()));
    }
    // Heaviest items first shrinks the search tree.
    let mut units: Vec<u32> = Vec::new();
    for item in &instance.items {
        for _ in 0..item.demand {
            units.push(item.index);
        }
    }
    units.sort_by(|a, b| {
        let key = |i: &u32| {
            instance
                .item(*i)
                .incarnations
                .iter()
                .map(|inc| inc.weight.clone())
                .max()
                .unwrap()
        };
        key(b).cmp(&key(a)).then(a.cmp(b))
    });
    let best_value: Vec<Ratio<i64>> = (0..instance.dims)
        .map(|d| {
            instance
                .bins
                .iter()
                .map(|bin| Ratio::from_integer(bin.capacity[d] as i64) / bin.cost.clone())
                .max()
                .unwrap_or_else(Ratio::zero)
        })
        .collect();
    let mut search = Search {
        instance,
        units,
        best_value,
        best_cost: None,
        best_bins: Vec::new(),
        bins: Vec::new(),
        current_cost: Cost::zero(),
    };
    search.search(0);
    match search.best_cost {
        Some(cost) => Ok((cost, search.best_bins)),
        None => {
            if search.units.is_empty() {
                Ok((Cost::zero(), Vec::new()))
            } else {
                Err(Error::Infeasible(
                    "no assignment packs every unit".into(),
                ))
            }
        }
    }
}

/// Oracle as a backend: solve by exhaustive search, then realize the best
/// bins as flows on the graph so the report is interchangeable with the
/// other backends.
pub(crate) fn solve_via_oracle(
    model: &FlowModel,
    graph: &ArcFlowGraph,
    instance: &Instance,
) -> Result<SolveReport> {
    let (cost, bins) = solve_oracle_bins(instance)?;
    // Map each bin to a witness path of its item multiset.
    let mut per_type: std::collections::BTreeMap<u32, Vec<Vec<u32>>> = Default::default();
    for bin in &bins {
        let mut pattern: Vec<u32> = bin.contents.iter().map(|&(i, _)| i).collect();
        pattern.sort_unstable();
        per_type.entry(bin.bin_type).or_default().push(pattern);
    }
    let mut realized: Vec<(u32, Vec<usize>, u64)> = Vec::new();
    for (t, patterns) in per_type {
        let witnesses =
            enumerate_patterns_with_witness(graph, t, u64::MAX, u64::MAX)?;
        for pattern in patterns {
            let witness = witnesses.get(&pattern).ok_or_else(|| {
                Error::Solver(format!(
                    "oracle bin pattern {pattern:?} missing from the type {t} graph"
                ))
            })?;
            realized.push((t, witness.clone(), 1));
        }
    }
    let (flows, z) = flows_from_paths(model, graph, &realized)?;
    let objective = verify_solution(model, &flows, z)?;
    debug_assert_eq!(objective, cost);
    Ok(SolveReport {
        status: SolveStatus::Optimal,
        objective: Some(objective),
        flows,
        z,
        bb_nodes: 0,
        lp_bound: None,
        time_model: std::time::Duration::ZERO,
        time_total: std::time::Duration::ZERO,
        message: None,
    })
}
