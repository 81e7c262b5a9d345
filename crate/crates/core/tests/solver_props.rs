//! Cross-backend agreement and end-to-end solution properties on random
//! small instances, with the exhaustive oracle as ground truth.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::random_small_instance;
use mvbp_core::instance::parse_instance;
use mvbp_core::model::default_j;
use mvbp_core::pipeline;
use mvbp_core::solution::validate;
use mvbp_core::solve::{solve_oracle, BackendConfig, SolveStatus};

#[test]
fn builtin_matches_oracle_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);
    for round in 0..120 {
        let instance = random_small_instance(&mut rng, 8);
        let expected = solve_oracle(&instance).unwrap();
        let result = pipeline::run(&instance, &BackendConfig::builtin()).unwrap();
        assert_eq!(result.report.status, SolveStatus::Optimal, "round {round}");
        assert_eq!(
            result.report.objective,
            Some(expected.clone()),
            "round {round}: builtin disagrees with oracle on {}",
            mvbp_core::instance::render_instance(&instance)
        );
    }
}

#[test]
fn oracle_backend_agrees_with_builtin() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    for _ in 0..40 {
        let instance = random_small_instance(&mut rng, 7);
        let builtin = pipeline::run(&instance, &BackendConfig::builtin()).unwrap();
        let oracle = pipeline::run(&instance, &BackendConfig::oracle()).unwrap();
        assert_eq!(builtin.report.objective, oracle.report.objective);
    }
}

#[test]
fn extracted_solutions_always_validate() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xabcd);
    for _ in 0..80 {
        let instance = random_small_instance(&mut rng, 8);
        let result = pipeline::run(&instance, &BackendConfig::builtin()).unwrap();
        let solution = result.solution.expect("optimal");
        let verdict = validate(&solution, &instance, &default_j(&instance));
        assert!(verdict.passed(), "{:?}", verdict.violations);
        assert_eq!(solution.bins.len() as u64, result.report.z);
        assert_eq!(Some(solution.total_cost), result.report.objective);
    }
}

#[test]
fn lp_bound_never_exceeds_the_optimum() {
    use num_traits::ToPrimitive;
    let mut rng = ChaCha8Rng::seed_from_u64(0x10ad);
    for _ in 0..60 {
        let instance = random_small_instance(&mut rng, 8);
        let result = pipeline::run(&instance, &BackendConfig::builtin()).unwrap();
        let optimum = result.report.objective.unwrap().to_f64().unwrap();
        if let Some(bound) = result.report.lp_bound {
            assert!(
                bound <= optimum + 1e-6 * (1.0 + optimum.abs()),
                "lp bound {bound} exceeds optimum {optimum}"
            );
        }
    }
}

#[test]
fn z_counts_bins_and_objective_sums_costs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51);
    for _ in 0..40 {
        let instance = random_small_instance(&mut rng, 8);
        let result = pipeline::run(&instance, &BackendConfig::builtin()).unwrap();
        let solution = result.solution.unwrap();
        let cost_sum: mvbp_core::instance::Cost = solution
            .bins
            .iter()
            .map(|b| instance.bin(b.bin_type).cost.clone())
            .sum();
        assert_eq!(Some(cost_sum), result.report.objective);
        assert_eq!(solution.bins.len() as u64, result.report.z);
    }
}

#[test]
fn rational_costs_stay_exact() {
    // Two bin types whose costs only differ in the second decimal; exact
    // arithmetic must prefer two small bins (cost 51/10) over one big
    // (26/5 = 52/10).
    let text = "1\n2\n26/5 10\n51/20 5\n1\n2 1\n  5\n";
    let instance = parse_instance(text).unwrap();
    let result = pipeline::run(&instance, &BackendConfig::builtin()).unwrap();
    let expected = solve_oracle(&instance).unwrap();
    assert_eq!(result.report.objective, Some(expected));
    assert_eq!(
        result.report.objective,
        Some(num_rational::Ratio::new(51, 10))
    );
}
