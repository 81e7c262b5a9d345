//! Shared test helpers: a brute-force pattern oracle independent of the
//! graph machinery, and a deterministic generator of small random
//! instances.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use mvbp_core::instance::{BinType, Cost, Incarnation, Instance, ItemType};

/// Every item-index multiset realizable by some incarnation choice that
/// fits the capacity of bin type `t` with per-item counts at most the
/// demands.  Enumerated directly from the instance data.
pub fn brute_force_patterns(instance: &Instance, t: u32) -> BTreeSet<Vec<u32>> {
    let capacity = &instance.bin(t).capacity;
    let incarnations: Vec<(u32, &[u32])> = instance
        .items
        .iter()
        .flat_map(|item| {
            item.incarnations
                .iter()
                .map(|inc| (inc.item, inc.weight.as_slice()))
        })
        .collect();
    let mut remaining: Vec<u64> = instance.items.iter().map(|i| i.demand).collect();
    let mut used = vec![0u64; instance.dims];
    let mut chosen: Vec<u32> = Vec::new();
    let mut out = BTreeSet::new();

    fn extend(
        from: usize,
        incarnations: &[(u32, &[u32])],
        capacity: &[u32],
        remaining: &mut [u64],
        used: &mut [u64],
        chosen: &mut Vec<u32>,
        out: &mut BTreeSet<Vec<u32>>,
    ) {
        let mut pattern = chosen.clone();
        pattern.sort_unstable();
        out.insert(pattern);
        for idx in from..incarnations.len() {
            let (item, weight) = incarnations[idx];
            if remaining[(item - 1) as usize] == 0 {
                continue;
            }
            let fits = (0..used.len()).all(|d| used[d] + weight[d] as u64 <= capacity[d] as u64);
            if !fits {
                continue;
            }
            remaining[(item - 1) as usize] -= 1;
            for d in 0..used.len() {
                used[d] += weight[d] as u64;
            }
            chosen.push(item);
            extend(idx, incarnations, capacity, remaining, used, chosen, out);
            chosen.pop();
            for d in 0..used.len() {
                used[d] -= weight[d] as u64;
            }
            remaining[(item - 1) as usize] += 1;
        }
    }

    extend(
        0,
        &incarnations,
        capacity,
        &mut remaining,
        &mut used,
        &mut chosen,
        &mut out,
    );
    out
}

/// A small random instance: up to `max_units` demanded units, up to three
/// dimensions and bin types, up to two incarnations per item.  Every
/// incarnation is sampled inside some bin's capacity so instances are
/// always feasible.
pub fn random_small_instance(rng: &mut ChaCha8Rng, max_units: u64) -> Instance {
    let dims = rng.gen_range(1..=3usize);
    let q = rng.gen_range(1..=3usize);
    let bins: Vec<BinType> = (1..=q)
        .map(|t| BinType {
            index: t as u32,
            capacity: (0..dims).map(|_| rng.gen_range(3..=12u32)).collect(),
            cost: Cost::from_integer(rng.gen_range(1..=9i64)),
        })
        .collect();
    let m = rng.gen_range(1..=3usize);
    let mut units_left = max_units.saturating_sub(m as u64);
    let mut items = Vec::with_capacity(m);
    for i in 1..=m {
        let extra = if units_left > 0 {
            let e = rng.gen_range(0..=units_left.min(3));
            units_left -= e;
            e
        } else {
            0
        };
        let num_incs = rng.gen_range(1..=2usize);
        let mut incarnations: Vec<Incarnation> = Vec::new();
        for j in 1..=num_incs {
            // Sample inside a random bin so the item always fits somewhere.
            let host = &bins[rng.gen_range(0..q)];
            let weight: Vec<u32> = (0..dims)
                .map(|d| rng.gen_range(1..=host.capacity[d].max(1)))
                .collect();
            if incarnations.iter().any(|inc| inc.weight == weight) {
                continue;
            }
            incarnations.push(Incarnation {
                item: i as u32,
                variant: j as u32,
                weight,
            });
        }
        // Re-number variants in case a duplicate draw was skipped.
        for (pos, inc) in incarnations.iter_mut().enumerate() {
            inc.variant = (pos + 1) as u32;
        }
        items.push(ItemType {
            index: i as u32,
            demand: 1 + extra,
            incarnations,
        });
    }
    Instance::new(dims, items, bins).expect("constructed instances are valid")
}

pub const SAMPLE: &str = "\
2
2
3 100 75
2 75 50
2
2 1
  75 50
1 2
  40 15
  25 25
";
