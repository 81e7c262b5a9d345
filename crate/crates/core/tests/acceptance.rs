//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line.  Run with `--nocapture --test-threads 1` to watch the lines go
//! by; several criteria build the full benchmark grid and take minutes.

mod common;

use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{brute_force_patterns, random_small_instance};
use mvbp_core::graph::{
    build_type_graph, compress_final, enumerate_patterns, export_dot, psi_labels, stitch,
    ArcFlowGraph, DEFAULT_PATH_CAP,
};
use mvbp_core::instance::{
    generate_instance, parse_instance, BinClass, Cost, Instance, RangeClass,
};
use mvbp_core::model::{assemble, default_j, emit_lp, verify_solution, RowSense};
use mvbp_core::pipeline;
use mvbp_core::solution::{extract, render_text, Bin};
use mvbp_core::solve::{solve_oracle, BackendConfig, BackendKind, SolveStatus};

fn verdict(criterion: &str, ok: bool, detail: &str) -> bool {
    println!(
        "criterion {criterion}: {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn stitched(instance: &Instance) -> ArcFlowGraph {
    let graphs = (1..=instance.num_bins() as u32)
        .map(|t| build_type_graph(instance, t).unwrap())
        .collect();
    stitch(graphs).unwrap()
}

fn grid_seeds() -> Vec<(RangeClass, BinClass, u64, u64)> {
    let mut cells = Vec::new();
    for range in [RangeClass::X1, RangeClass::X2, RangeClass::X3] {
        for bins in [BinClass::Q3, BinClass::Q5] {
            for n in [25u64, 50, 100, 200, 500] {
                for seed in 0..10u64 {
                    cells.push((range, bins, n, seed));
                }
            }
        }
    }
    cells
}

fn external_command() -> Option<String> {
    let probe = std::process::Command::new("python3")
        .args(["-c", "from scipy.optimize import milp"])
        .status()
        .map(|s| s.success())
        .unwrap_or(false);
    if !probe {
        return None;
    }
    let script = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scripts/solve_lp.py");
    let script = script.canonicalize().ok()?;
    Some(format!(
        "python3 {} {{model_file}} {{solution_file}} 55",
        script.display()
    ))
}

#[test]
fn criterion_1_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce97ed);
    let mut checked = 0usize;
    for round in 0..500 {
        let instance = random_small_instance(&mut rng, 8);
        let expected = solve_oracle(&instance).unwrap();
        let result = pipeline::run(&instance, &BackendConfig::builtin()).unwrap();
        assert_eq!(
            result.report.objective.as_ref(),
            Some(&expected),
            "round {round} diverged on:\n{}",
            mvbp_core::instance::render_instance(&instance)
        );
        checked += 1;
    }
    let elapsed = started.elapsed();
    let ok = checked == 500 && elapsed.as_secs_f64() < 120.0;
    assert!(verdict(
        "1 (oracle equivalence)",
        ok,
        &format!("{checked}/500 random instances matched in {elapsed:.2?}")
    ));
}

#[test]
fn criterion_2_reference_instance_reproduction() {
    let instance = parse_instance(common::SAMPLE).unwrap();
    let result = pipeline::run(&instance, &BackendConfig::builtin()).unwrap();
    let solution = result.solution.expect("optimal");
    let cost_ok = solution.total_cost == Cost::from_integer(5);
    let bins_ok = solution.bins
        == vec![
            Bin {
                bin_type: 1,
                contents: vec![(1, 1), (2, 2)],
            },
            Bin {
                bin_type: 2,
                contents: vec![(1, 1)],
            },
        ];
    assert!(verdict(
        "2 (reference instance)",
        cost_ok && bins_ok,
        &format!(
            "cost {} bins {:?}",
            mvbp_core::instance::cost_to_string(&solution.total_cost),
            solution.bins
        )
    ));
}

#[test]
fn criterion_3_pattern_set_contract() {
    let mut corpus: Vec<Instance> = vec![parse_instance(common::SAMPLE).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..150 {
        corpus.push(random_small_instance(&mut rng, 10));
    }
    let mut checked = 0usize;
    for instance in &corpus {
        let graph = stitched(instance);
        let (compressed, _) = compress_final(&graph, instance);
        for t in 1..=instance.num_bins() as u32 {
            let expected = brute_force_patterns(instance, t);
            let before = enumerate_patterns(&graph, t, DEFAULT_PATH_CAP).unwrap();
            let after = enumerate_patterns(&compressed, t, DEFAULT_PATH_CAP).unwrap();
            assert_eq!(before, expected, "stitched graph, bin type {t}");
            assert_eq!(after, expected, "compressed graph, bin type {t}");
            checked += 1;
        }
    }
    assert!(verdict(
        "3 (pattern sets)",
        true,
        &format!(
            "{} per-type graphs matched brute force, before and after compression",
            checked
        )
    ));
}

#[test]
fn criterion_4_psi_correctness() {
    let mut corpus: Vec<Instance> = vec![parse_instance(common::SAMPLE).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        corpus.push(random_small_instance(&mut rng, 9));
    }
    let mut arcs_checked = 0usize;
    for instance in &corpus {
        let graph = stitched(instance);
        let (compressed, _) = compress_final(&graph, instance);
        for g in [&graph, &compressed] {
            let psi = psi_labels(g, instance);
            assert!(psi[g.source().idx()].iter().all(|&v| v == 0), "psi(S) != 0");
            let in_adj = g.in_adjacency();
            for v in 1..g.num_nodes() {
                for d in 0..instance.dims {
                    let expected = in_adj[v]
                        .iter()
                        .map(|&i| {
                            let arc = g.arcs()[i];
                            let w = if arc.label.is_loss() {
                                0
                            } else {
                                instance.weight(arc.label.item, arc.label.variant)[d] as u64
                            };
                            psi[arc.tail.idx()][d] + w
                        })
                        .max()
                        .unwrap_or(0);
                    assert_eq!(psi[v][d], expected, "recurrence at node {v}");
                }
            }
            for arc in g.arcs() {
                for d in 0..instance.dims {
                    let w = if arc.label.is_loss() {
                        0
                    } else {
                        instance.weight(arc.label.item, arc.label.variant)[d] as u64
                    };
                    assert!(psi[arc.head.idx()][d] >= psi[arc.tail.idx()][d] + w);
                    arcs_checked += 1;
                }
            }
        }
    }
    assert!(verdict(
        "4 (longest-path labels)",
        true,
        &format!("recurrence and monotonicity verified on {arcs_checked} arc-dimensions")
    ));
}

#[test]
fn criterion_5_compression_effectiveness() {
    let mut x1q5 = Vec::new();
    let mut x3q3 = Vec::new();
    let mut x3q3_n500_arcs = Vec::new();
    for (range, bins, n, seed) in grid_seeds() {
        let x1 = range == RangeClass::X1 && bins == BinClass::Q5;
        let x3 = range == RangeClass::X3 && bins == BinClass::Q3;
        if !x1 && !x3 {
            continue;
        }
        let instance = generate_instance(range, bins, n, seed).unwrap();
        let (_, stats) = pipeline::build_graph(&instance).unwrap();
        if x1 {
            x1q5.push(stats.pct_vertices_removed);
        }
        if x3 {
            x3q3.push(stats.pct_vertices_removed);
            if n == 500 {
                x3q3_n500_arcs.push(stats.num_arcs as f64);
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let x1_mean = mean(&x1q5);
    let x3_mean = mean(&x3q3);
    let arcs_mean = mean(&x3q3_n500_arcs);

    let x1_ok = verdict(
        "5a (mean %v removed, X=1/q=5 >= 40)",
        x1_mean >= 40.0,
        &format!("measured {x1_mean:.2}% over {} instances", x1q5.len()),
    );
    let x3_ok = verdict(
        "5b (mean %v removed, X=3/q=3 <= 30)",
        x3_mean <= 30.0,
        &format!("measured {x3_mean:.2}% over {} instances", x3q3.len()),
    );
    let arcs_ok = verdict(
        "5c (mean #a for X=3/q=3, n=500 within 4x of 260)",
        (65.0..=1040.0).contains(&arcs_mean),
        &format!("measured {arcs_mean:.1} arcs"),
    );
    assert!(
        x1_ok && x3_ok && arcs_ok,
        "compression effectiveness: x1q5 {x1_mean:.2}%, x3q3 {x3_mean:.2}%, arcs {arcs_mean:.1}"
    );
}

#[test]
fn criterion_6_scale_and_time_ceiling() {
    // Builtin leg: every class within the pattern cap, at minimum all
    // X=3 classes, must solve optimally in under 120 seconds each.
    let mut builtin_ok = true;
    let mut builtin_solved = 0usize;
    let mut builtin_max = 0.0f64;
    for (range, bins, n, seed) in grid_seeds() {
        if range != RangeClass::X3 {
            continue;
        }
        let instance = generate_instance(range, bins, n, seed).unwrap();
        let result = pipeline::run(&instance, &BackendConfig::builtin()).unwrap();
        let elapsed = result.report.time_total.as_secs_f64();
        builtin_max = builtin_max.max(elapsed);
        if result.report.status == SolveStatus::Optimal && elapsed < 120.0 {
            builtin_solved += 1;
        } else {
            builtin_ok = false;
        }
    }
    let builtin_ok = verdict(
        "6a (builtin, X=3 classes < 120 s each)",
        builtin_ok,
        &format!("{builtin_solved}/100 optimal, slowest {builtin_max:.2}s"),
    );

    // External leg: all 300 instances to proven optimality within 60
    // seconds each.
    let Some(command) = external_command() else {
        println!("criterion 6b (external, 300 instances <= 60 s): SKIPPED — no external MILP backend available");
        assert!(builtin_ok);
        return;
    };
    let config = BackendConfig {
        kind: BackendKind::External,
        command_template: Some(command),
        time_limit: Some(std::time::Duration::from_secs(70)),
        ..BackendConfig::default()
    };
    let mut solved = 0usize;
    let mut breaches: Vec<String> = Vec::new();
    let mut max_time = 0.0f64;
    for (range, bins, n, seed) in grid_seeds() {
        let instance = generate_instance(range, bins, n, seed).unwrap();
        let label = format!("X={}/q={}/n={n}/seed {seed}", range.index(), bins.count());
        match pipeline::run(&instance, &config) {
            Ok(result) => {
                let elapsed = result.report.time_total.as_secs_f64();
                max_time = max_time.max(elapsed);
                if result.report.status == SolveStatus::Optimal && elapsed <= 60.0 {
                    solved += 1;
                } else {
                    breaches.push(format!("{label}: {:?} after {elapsed:.1}s", result.report.status));
                }
            }
            Err(e) => breaches.push(format!("{label}: {e}")),
        }
    }
    let external_ok = verdict(
        "6b (external, 300 instances <= 60 s)",
        breaches.is_empty(),
        &format!(
            "{solved}/300 optimal within the ceiling, max {max_time:.1}s{}",
            if breaches.is_empty() {
                String::new()
            } else {
                format!("; breaches: {}", breaches.join("; "))
            }
        ),
    );
    assert!(builtin_ok && external_ok);
}

#[test]
fn criterion_7_model_structure() {
    let mut corpus: Vec<Instance> = vec![parse_instance(common::SAMPLE).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..80 {
        corpus.push(random_small_instance(&mut rng, 8));
    }
    corpus.push(generate_instance(RangeClass::X3, BinClass::Q3, 100, 1).unwrap());
    corpus.push(generate_instance(RangeClass::X2, BinClass::Q5, 50, 2).unwrap());
    let mut models = 0usize;
    for instance in &corpus {
        let (graph, _) = pipeline::build_graph(instance).unwrap();
        let j = default_j(instance);
        let model = assemble(&graph, instance, &j).unwrap();
        assert_eq!(model.num_vars(), graph.num_arcs() + 1, "vars = arcs + 1");
        assert_eq!(
            model.num_rows(),
            graph.num_nodes() + instance.num_items(),
            "rows = nodes + items"
        );
        // Conservation rows cancel symbolically.
        let mut sums = vec![0i64; model.num_vars()];
        for row in model.rows() {
            if let RowSense::Eq = row.sense {
                if row.name.starts_with("cons_") {
                    for (var, coeff) in row.terms {
                        sums[var] += coeff;
                    }
                }
            }
        }
        assert!(sums.iter().all(|&c| c == 0), "row sum does not cancel");
        // Every reported optimum passes the exact verifier.
        let report = mvbp_core::solve::solve(&model, &graph, instance, &BackendConfig::builtin())
            .unwrap();
        if report.status == SolveStatus::Optimal {
            let objective = verify_solution(&model, &report.flows, report.z).unwrap();
            assert_eq!(Some(objective), report.objective);
        }
        models += 1;
    }
    assert!(verdict(
        "7 (model structure)",
        true,
        &format!("{models} models checked: counts, cancellation, exact verification")
    ));
}

#[test]
fn criterion_8_determinism() {
    let run_once = |instance: &Instance| {
        let (graph, _) = pipeline::build_graph(instance).unwrap();
        let model = assemble(&graph, instance, &default_j(instance)).unwrap();
        let report =
            mvbp_core::solve::solve(&model, &graph, instance, &BackendConfig::builtin()).unwrap();
        let solution = extract(&graph, &report, instance).unwrap();
        (emit_lp(&model), export_dot(&graph), render_text(&solution))
    };
    let mut ok = true;
    let sample = parse_instance(common::SAMPLE).unwrap();
    let generated = generate_instance(RangeClass::X2, BinClass::Q3, 60, 9).unwrap();
    for instance in [&sample, &generated] {
        let (lp_a, dot_a, text_a) = run_once(instance);
        let (lp_b, dot_b, text_b) = run_once(instance);
        ok &= lp_a == lp_b && dot_a == dot_b && text_a == text_b;
    }
    let gen_a = mvbp_core::instance::render_instance(
        &generate_instance(RangeClass::X1, BinClass::Q5, 80, 3).unwrap(),
    );
    let gen_b = mvbp_core::instance::render_instance(
        &generate_instance(RangeClass::X1, BinClass::Q5, 80, 3).unwrap(),
    );
    ok &= gen_a == gen_b;
    assert!(verdict(
        "8 (determinism)",
        ok,
        "interchange files, DOT exports, solutions and generated instances are byte-identical"
    ));
}
