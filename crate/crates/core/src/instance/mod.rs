//! Instance data model for multiple-choice vector bin packing.
//!
//! An instance packs `n` items of `m` types into bins of `q` types.  Every
//! item type has a demand and one or more *incarnations* (alternative weight
//! vectors, exactly one of which is chosen per packed unit); every bin type
//! has a `p`-dimensional capacity vector and a positive cost.  Weights and
//! capacities are integers; rational inputs must be pre-scaled.

mod format;
mod generate;

pub use format::{parse_instance, parse_vbp_instance, render_instance};
pub use generate::{bin_cost_default, generate_instance, BinClass, RangeClass};

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};

/// Bin costs are exact rationals so that objectives compare without
/// floating-point tolerance.
pub type Cost = Ratio<i64>;

/// Renders a cost canonically: `5` or `5/2`.
pub fn cost_to_string(cost: &Cost) -> String {
    if cost.denom() == &1 {
        cost.numer().to_string()
    } else {
        format!("{}/{}", cost.numer(), cost.denom())
    }
}

/// One concrete weight vector an item may assume.  `item` and `variant` are
/// 1-based; the pair (0, 0) is reserved for the artificial zero-weight loss
/// label and never appears in an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Incarnation {
    pub item: u32,
    pub variant: u32,
    pub weight: Vec<u32>,
}

/// An item type: 1-based index, positive demand, non-empty incarnation list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ItemType {
    pub index: u32,
    pub demand: u64,
    pub incarnations: Vec<Incarnation>,
}

/// A bin type: 1-based index, capacity vector, positive cost.  Availability
/// is unbounded; the model imposes no per-type bin count limit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BinType {
    pub index: u32,
    pub capacity: Vec<u32>,
    pub cost: Cost,
}

/// A validated instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub dims: usize,
    pub items: Vec<ItemType>,
    pub bins: Vec<BinType>,
}

impl Instance {
    /// Builds and validates an instance.  An empty item list is allowed here
    /// (the parser is stricter); an item incarnation that fits no bin type is
    /// rejected as infeasible.
    pub fn new(dims: usize, items: Vec<ItemType>, bins: Vec<BinType>) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidInstance("p must be at least 1".into()));
        }
        for bin in &bins {
            if bin.capacity.len() != dims {
                return Err(Error::InvalidInstance(format!(
                    "bin type {} has {} capacity entries, expected {}",
                    bin.index,
                    bin.capacity.len(),
                    dims
                )));
            }
            if bin.cost <= Cost::zero() {
                return Err(Error::InvalidInstance(format!(
                    "bin type {} has non-positive cost {}",
                    bin.index,
                    cost_to_string(&bin.cost)
                )));
            }
        }
        for (pos, item) in items.iter().enumerate() {
            let expected_index = (pos + 1) as u32;
            if item.index != expected_index {
                return Err(Error::InvalidInstance(format!(
                    "item at position {} has index {}, expected {}",
                    pos + 1,
                    item.index,
                    expected_index
                )));
            }
            if item.demand == 0 {
                return Err(Error::InvalidInstance(format!(
                    "item {} has zero demand",
                    item.index
                )));
            }
            if item.incarnations.is_empty() {
                return Err(Error::InvalidInstance(format!(
                    "item {} has no incarnations",
                    item.index
                )));
            }
            for (jpos, inc) in item.incarnations.iter().enumerate() {
                let expected_variant = (jpos + 1) as u32;
                if inc.item != item.index || inc.variant != expected_variant {
                    return Err(Error::InvalidInstance(format!(
                        "incarnation ({}, {}) stored under item {} variant {}",
                        inc.item, inc.variant, item.index, expected_variant
                    )));
                }
                if inc.weight.len() != dims {
                    return Err(Error::InvalidInstance(format!(
                        "incarnation ({}, {}) has {} weight entries, expected {}",
                        inc.item,
                        inc.variant,
                        inc.weight.len(),
                        dims
                    )));
                }
                for prev in &item.incarnations[..jpos] {
                    if prev.weight == inc.weight {
                        return Err(Error::InvalidInstance(format!(
                            "item {} has duplicate incarnation weight vector {:?}",
                            item.index, inc.weight
                        )));
                    }
                }
            }
        }
        let instance = Instance { dims, items, bins };
        instance.check_fit()?;
        Ok(instance)
    }

    /// Every incarnation must fit in at least one bin type, otherwise the
    /// instance has no solution at all.
    fn check_fit(&self) -> Result<()> {
        for item in &self.items {
            for inc in &item.incarnations {
                let fits_somewhere = self
                    .bins
                    .iter()
                    .any(|bin| fits(&inc.weight, &bin.capacity));
                if !fits_somewhere {
                    // Name the first dimension that exceeds every capacity to
                    // make the diagnostic actionable.
                    let max_cap: Vec<u32> = (0..self.dims)
                        .map(|d| self.bins.iter().map(|b| b.capacity[d]).max().unwrap_or(0))
                        .collect();
                    let dim = (0..self.dims)
                        .find(|&d| inc.weight[d] > max_cap[d])
                        .map(|d| d + 1)
                        .unwrap_or(1);
                    return Err(Error::Infeasible(format!(
                        "incarnation {} of item {} fits in no bin type (dimension {} exceeds every capacity)",
                        inc.variant, item.index, dim
                    )));
                }
            }
        }
        Ok(())
    }

    /// Total number of item units, n = sum of demands.
    pub fn total_items(&self) -> u64 {
        self.items.iter().map(|it| it.demand).sum()
    }

    /// Number of item types, m.
    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    /// Number of bin types, q.
    pub fn num_bins(&self) -> usize {
        self.bins.len()
    }

    /// Number of dimensions, p.
    pub fn num_dims(&self) -> usize {
        self.dims
    }

    pub fn item(&self, index: u32) -> &ItemType {
        &self.items[(index - 1) as usize]
    }

    pub fn bin(&self, index: u32) -> &BinType {
        &self.bins[(index - 1) as usize]
    }

    /// Weight vector of incarnation (item, variant).
    pub fn weight(&self, item: u32, variant: u32) -> &[u32] {
        &self.item(item).incarnations[(variant - 1) as usize].weight
    }

    /// 64-bit FNV-1a over the canonical rendering; ties solutions to the
    /// instance they were extracted from.
    pub fn fingerprint(&self) -> String {
        let text = render_instance(self);
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in text.bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100_0000_01b3);
        }
        format!("{hash:016x}")
    }
}

/// Componentwise `weight <= capacity`.
pub fn fits(weight: &[u32], capacity: &[u32]) -> bool {
    weight.iter().zip(capacity).all(|(w, c)| w <= c)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_type_sample() -> Instance {
        Instance::new(
            2,
            vec![
                ItemType {
                    index: 1,
                    demand: 2,
                    incarnations: vec![Incarnation {
                        item: 1,
                        variant: 1,
                        weight: vec![75, 50],
                    }],
                },
                ItemType {
                    index: 2,
                    demand: 1,
                    incarnations: vec![
                        Incarnation {
                            item: 2,
                            variant: 1,
                            weight: vec![40, 15],
                        },
                        Incarnation {
                            item: 2,
                            variant: 2,
                            weight: vec![25, 25],
                        },
                    ],
                },
            ],
            vec![
                BinType {
                    index: 1,
                    capacity: vec![100, 75],
                    cost: Cost::from_integer(3),
                },
                BinType {
                    index: 2,
                    capacity: vec![75, 50],
                    cost: Cost::from_integer(2),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn sample_counts() {
        let inst = two_type_sample();
        assert_eq!(inst.total_items(), 3);
        assert_eq!(inst.num_items(), 2);
        assert_eq!(inst.num_bins(), 2);
        assert_eq!(inst.num_dims(), 2);
    }

    #[test]
    fn rejects_zero_demand() {
        let err = Instance::new(
            1,
            vec![ItemType {
                index: 1,
                demand: 0,
                incarnations: vec![Incarnation {
                    item: 1,
                    variant: 1,
                    weight: vec![1],
                }],
            }],
            vec![BinType {
                index: 1,
                capacity: vec![10],
                cost: Cost::from_integer(1),
            }],
        )
        .unwrap_err();
        assert!(err.to_string().contains("zero demand"));
    }

    #[test]
    fn rejects_duplicate_incarnations() {
        let err = Instance::new(
            1,
            vec![ItemType {
                index: 1,
                demand: 1,
                incarnations: vec![
                    Incarnation {
                        item: 1,
                        variant: 1,
                        weight: vec![3],
                    },
                    Incarnation {
                        item: 1,
                        variant: 2,
                        weight: vec![3],
                    },
                ],
            }],
            vec![BinType {
                index: 1,
                capacity: vec![10],
                cost: Cost::from_integer(1),
            }],
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate incarnation"));
    }

    #[test]
    fn rejects_unfittable_item() {
        let err = Instance::new(
            2,
            vec![ItemType {
                index: 1,
                demand: 1,
                incarnations: vec![Incarnation {
                    item: 1,
                    variant: 1,
                    weight: vec![200, 10],
                }],
            }],
            vec![
                BinType {
                    index: 1,
                    capacity: vec![150, 75],
                    cost: Cost::from_integer(1),
                },
                BinType {
                    index: 2,
                    capacity: vec![100, 75],
                    cost: Cost::from_integer(1),
                },
            ],
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Infeasible(_)), "{msg}");
        assert!(msg.contains("item 1"), "{msg}");
        assert!(msg.contains("dimension 1"), "{msg}");
    }

    #[test]
    fn fingerprint_is_stable() {
        let a = two_type_sample().fingerprint();
        let b = two_type_sample().fingerprint();
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
    }
}
