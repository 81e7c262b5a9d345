//! Random generator for the variable-sized bin packing benchmark classes.
//!
//! Classes are one-dimensional: item weights are drawn uniformly from one of
//! three ranges and bins come in three or five sizes.  Equal weights are
//! merged into a single item type with summed demand, so `m <= n`.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BinType, Cost, Incarnation, Instance, ItemType};
use crate::error::{Error, Result};

/// Weight ranges for generated items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeClass {
    /// Weights in [1, 100].
    X1,
    /// Weights in [20, 100].
    X2,
    /// Weights in [50, 100].
    X3,
}

impl RangeClass {
    pub fn bounds(self) -> (u32, u32) {
        match self {
            RangeClass::X1 => (1, 100),
            RangeClass::X2 => (20, 100),
            RangeClass::X3 => (50, 100),
        }
    }

    pub fn from_index(x: u32) -> Result<Self> {
        match x {
            1 => Ok(RangeClass::X1),
            2 => Ok(RangeClass::X2),
            3 => Ok(RangeClass::X3),
            other => Err(Error::InvalidInstance(format!(
                "range class must be 1, 2 or 3, got {other}"
            ))),
        }
    }

    pub fn index(self) -> u32 {
        match self {
            RangeClass::X1 => 1,
            RangeClass::X2 => 2,
            RangeClass::X3 => 3,
        }
    }
}

/// Number of bin types in a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinClass {
    Q3,
    Q5,
}

impl BinClass {
    pub fn sizes(self) -> &'static [u32] {
        match self {
            BinClass::Q3 => &[100, 120, 150],
            BinClass::Q5 => &[60, 80, 100, 120, 150],
        }
    }

    pub fn from_count(q: u32) -> Result<Self> {
        match q {
            3 => Ok(BinClass::Q3),
            5 => Ok(BinClass::Q5),
            other => Err(Error::InvalidInstance(format!(
                "bin class must have 3 or 5 types, got {other}"
            ))),
        }
    }

    pub fn count(self) -> u32 {
        match self {
            BinClass::Q3 => 3,
            BinClass::Q5 => 5,
        }
    }
}

/// Default cost of a generated bin: equal to its size.  The file format can
/// override this with explicit costs.
pub fn bin_cost_default(capacity: u32) -> Cost {
    Cost::from_integer(capacity as i64)
}

/// Generates a one-dimensional instance of the given class.  Deterministic:
/// the same arguments always produce the same instance.
pub fn generate_instance(
    range_class: RangeClass,
    bin_class: BinClass,
    n: u64,
    seed: u64,
) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidInstance(
            "generated instances need at least one item".into(),
        ));
    }
    let (lo, hi) = range_class.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(lo, hi);
    let mut demand_by_weight: BTreeMap<u32, u64> = BTreeMap::new();
    for _ in 0..n {
        *demand_by_weight.entry(dist.sample(&mut rng)).or_insert(0) += 1;
    }
    // Heaviest item first; index assignment follows this order.
    let items: Vec<ItemType> = demand_by_weight
        .into_iter()
        .rev()
        .enumerate()
        .map(|(pos, (weight, demand))| ItemType {
            index: (pos + 1) as u32,
            demand,
            incarnations: vec![Incarnation {
                item: (pos + 1) as u32,
                variant: 1,
                weight: vec![weight],
            }],
        })
        .collect();
    let bins: Vec<BinType> = bin_class
        .sizes()
        .iter()
        .enumerate()
        .map(|(pos, &size)| BinType {
            index: (pos + 1) as u32,
            capacity: vec![size],
            cost: bin_cost_default(size),
        })
        .collect();
    Instance::new(1, items, bins)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cost_equals_capacity() {
        assert_eq!(bin_cost_default(150), Cost::from_integer(150));
        assert_eq!(bin_cost_default(60), Cost::from_integer(60));
    }

    #[test]
    fn narrow_range_bounds_item_count() {
        let inst = generate_instance(RangeClass::X3, BinClass::Q3, 500, 7).unwrap();
        assert!(inst.num_items() <= 51);
        for item in &inst.items {
            let w = item.incarnations[0].weight[0];
            assert!((50..=100).contains(&w));
        }
        assert_eq!(inst.total_items(), 500);
    }

    #[test]
    fn five_bin_class_sizes() {
        let inst = generate_instance(RangeClass::X1, BinClass::Q5, 25, 7).unwrap();
        let sizes: Vec<u32> = inst.bins.iter().map(|b| b.capacity[0]).collect();
        assert_eq!(sizes, vec![60, 80, 100, 120, 150]);
    }

    #[test]
    fn same_seed_same_instance() {
        let a = generate_instance(RangeClass::X2, BinClass::Q5, 100, 42).unwrap();
        let b = generate_instance(RangeClass::X2, BinClass::Q5, 100, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(RangeClass::X2, BinClass::Q5, 100, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn merging_preserves_total_demand() {
        for seed in 0..20 {
            let inst = generate_instance(RangeClass::X1, BinClass::Q3, 200, seed).unwrap();
            assert_eq!(inst.total_items(), 200);
        }
    }
}
