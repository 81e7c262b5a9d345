//! Property tests for the text format and the generator.

mod common;

use proptest::prelude::*;

use mvbp_core::instance::{
    generate_instance, parse_instance, render_instance, BinClass, BinType, Cost, Incarnation,
    Instance, ItemType, RangeClass,
};

fn arb_cost() -> impl Strategy<Value = Cost> {
    (1i64..50, 1i64..8).prop_map(|(num, den)| Cost::new(num * den, den))
}

fn arb_instance() -> impl Strategy<Value = Instance> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(dims, q)| {
        let bins = proptest::collection::vec(
            (arb_cost(), proptest::collection::vec(2u32..40, dims..=dims)),
            q..=q,
        );
        let items = proptest::collection::vec(
            (
                1u64..4,
                proptest::collection::vec(
                    proptest::collection::vec(1u32..=2, dims..=dims),
                    1..=2,
                ),
            ),
            1..=4,
        );
        (Just(dims), bins, items).prop_filter_map(
            "valid instance",
            |(dims, bins, items)| {
                let bins: Vec<BinType> = bins
                    .into_iter()
                    .enumerate()
                    .map(|(pos, (cost, capacity))| BinType {
                        index: (pos + 1) as u32,
                        capacity,
                        cost,
                    })
                    .collect();
                let items: Vec<ItemType> = items
                    .into_iter()
                    .enumerate()
                    .map(|(pos, (demand, weights))| {
                        let mut incarnations: Vec<Incarnation> = Vec::new();
                        for weight in weights {
                            if incarnations.iter().any(|i| i.weight == weight) {
                                continue;
                            }
                            incarnations.push(Incarnation {
                                item: (pos + 1) as u32,
                                variant: (incarnations.len() + 1) as u32,
                                weight,
                            });
                        }
                        ItemType {
                            index: (pos + 1) as u32,
                            demand,
                            incarnations,
                        }
                    })
                    .collect();
                Instance::new(dims, items, bins).ok()
            },
        )
    })
}

proptest! {
    #[test]
    fn parse_render_round_trips(instance in arb_instance()) {
        let rendered = render_instance(&instance);
        let reparsed = parse_instance(&rendered).unwrap();
        prop_assert_eq!(instance, reparsed);
    }

    #[test]
    fn generator_is_pure(seed in any::<u64>(), n in 1u64..80) {
        let a = generate_instance(RangeClass::X2, BinClass::Q5, n, seed).unwrap();
        let b = generate_instance(RangeClass::X2, BinClass::Q5, n, seed).unwrap();
        prop_assert_eq!(render_instance(&a), render_instance(&b));
        prop_assert_eq!(a.total_items(), n);
    }
}
