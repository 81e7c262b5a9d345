//! Command-line front end: solve instances, generate and run benchmark
//! suites, inspect graphs and validate solutions.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use mvbp_core::bench::{default_grid, render_csv, render_table, run_bench, BenchClass};
use mvbp_core::graph::{export_dot, export_json};
use mvbp_core::instance::{
    cost_to_string, generate_instance, parse_instance, render_instance, BinClass, RangeClass,
};
use mvbp_core::model::emit_lp;
use mvbp_core::pipeline;
use mvbp_core::solution::{parse_text, render_json, render_text, validate};
use mvbp_core::solve::{BackendConfig, BackendKind, SolveStatus};
use mvbp_core::Error;

/// Exact multiple-choice vector bin packing solver.
#[derive(Parser)]
#[command(name = "mvbp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BackendArgs {
    /// Solver backend: external, builtin or oracle.
    #[arg(long)]
    backend: Option<String>,
    /// External solver command with {model_file} and {solution_file}
    /// placeholders; MVBP_SOLVER_CMD is the environment fallback.
    #[arg(long)]
    solver_cmd: Option<String>,
    /// Wall-clock limit per solve, in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Node limit for the builtin branch-and-bound.
    #[arg(long)]
    node_limit: Option<u64>,
}

impl BackendArgs {
    fn config(&self) -> Result<BackendConfig, Error> {
        let template = self
            .solver_cmd
            .clone()
            .or_else(|| std::env::var("MVBP_SOLVER_CMD").ok())
            .filter(|t| !t.trim().is_empty());
        let kind = match &self.backend {
            Some(name) => name.parse::<BackendKind>()?,
            None => {
                if template.is_some() {
                    BackendKind::External
                } else {
                    BackendKind::Builtin
                }
            }
        };
        if kind == BackendKind::External && template.is_none() {
            return Err(Error::Solver(
                "external backend selected but no --solver-cmd or MVBP_SOLVER_CMD given".into(),
            ));
        }
        Ok(BackendConfig {
            kind,
            command_template: template,
            time_limit: self.time_limit.map(Duration::from_secs_f64),
            node_limit: self.node_limit,
            ..BackendConfig::default()
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance end to end and print the packing.
    Solve {
        /// Instance file (native or classical VBP format).
        instance: PathBuf,
        #[command(flatten)]
        backend: BackendArgs,
        /// Write the model in LP format to this path as well.
        #[arg(long)]
        emit_model: Option<PathBuf>,
        /// Write the model in LP format and skip solving.
        #[arg(long)]
        emit_model_only: Option<PathBuf>,
        /// Print the solution as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Write the solution to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate benchmark classes, solve them and print a results table.
    Bench {
        #[command(flatten)]
        backend: BackendArgs,
        /// Classes as comma-separated range:q:n triples, e.g. 3:3:100;
        /// the full grid when omitted.
        #[arg(long)]
        classes: Option<String>,
        /// Instances per class.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// Base seed for instance generation.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the table as CSV to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate one benchmark instance.
    Gen {
        /// Weight range class: 1, 2 or 3.
        #[arg(long)]
        range: u32,
        /// Number of bin types: 3 or 5.
        #[arg(long)]
        bins: u32,
        /// Number of items.
        #[arg(short, long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the graph and report compression statistics.
    Graph {
        instance: PathBuf,
        /// Write the compressed graph in DOT format.
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the compressed graph as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Validate a solution file against an instance.
    Validate {
        instance: PathBuf,
        /// Solution in the text format (one `t: (i,j) ...` line per bin).
        solution: PathBuf,
    },
}

fn parse_classes(spec: &str) -> Result<Vec<BenchClass>, Error> {
    let mut classes = Vec::new();
    for part in spec.split(',') {
        let fields: Vec<&str> = part.split(':').collect();
        let [x, q, n] = fields.as_slice() else {
            return Err(Error::Solver(format!(
                "class `{part}` is not of the form range:q:n"
            )));
        };
        let bad = |what: &str| Error::Solver(format!("class `{part}`: invalid {what}"));
        let range = RangeClass::from_index(x.parse().map_err(|_| bad("range"))?)?;
        let bins = BinClass::from_count(q.parse().map_err(|_| bad("q"))?)?;
        let n: u64 = n.parse().map_err(|_| bad("n"))?;
        classes.push(BenchClass { range, bins, n });
    }
    Ok(classes)
}

fn run() -> Result<ExitCode, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Solve {
            instance,
            backend,
            emit_model,
            emit_model_only,
            json,
            out,
        } => {
            let text = std::fs::read_to_string(&instance)?;
            let inst = parse_instance(&text)?;
            if let Some(path) = &emit_model_only {
                let (graph, _) = pipeline::build_graph(&inst)?;
                let j = mvbp_core::model::default_j(&inst);
                let model = mvbp_core::model::assemble(&graph, &inst, &j)?;
                std::fs::write(path, emit_lp(&model))?;
                eprintln!("model written to {}", path.display());
                return Ok(ExitCode::SUCCESS);
            }
            let config = backend.config()?;
            let result = pipeline::run(&inst, &config)?;
            if let Some(path) = &emit_model {
                std::fs::write(path, emit_lp(&result.model))?;
            }
            match result.report.status {
                SolveStatus::Optimal => {
                    let solution = result.solution.expect("optimal runs carry a solution");
                    let rendered = if json {
                        render_json(&solution)
                    } else {
                        render_text(&solution)
                    };
                    let summary = format!(
                        "cost {} with {} bins (nodes {}, solve {:.3}s, total {:.3}s)",
                        cost_to_string(&solution.total_cost),
                        solution.bins.len(),
                        result.report.bb_nodes,
                        result.report.time_model.as_secs_f64(),
                        result.report.time_total.as_secs_f64(),
                    );
                    match out {
                        Some(path) => {
                            std::fs::write(&path, rendered)?;
                            eprintln!("{summary}; solution written to {}", path.display());
                        }
                        None => {
                            eprintln!("{summary}");
                            print!("{rendered}");
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
                SolveStatus::Infeasible => {
                    eprintln!("infeasible: {}", result.report.message.unwrap_or_default());
                    Ok(ExitCode::from(2))
                }
                SolveStatus::Limit => {
                    eprintln!("limit: {}", result.report.message.unwrap_or_default());
                    Ok(ExitCode::from(3))
                }
            }
        }
        Command::Bench {
            backend,
            classes,
            seeds,
            seed,
            out,
        } => {
            let config = backend.config()?;
            let classes = match classes {
                Some(spec) => parse_classes(&spec)?,
                None => default_grid(),
            };
            let report = run_bench(&classes, seeds, seed, &config)?;
            print!("{}", render_table(&report));
            if let Some(path) = out {
                std::fs::write(&path, render_csv(&report))?;
                eprintln!("csv written to {}", path.display());
            }
            let all_solved = report.total_solved == report.total_instances;
            Ok(if all_solved {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Gen {
            range,
            bins,
            n,
            seed,
            out,
        } => {
            let instance = generate_instance(
                RangeClass::from_index(range)?,
                BinClass::from_count(bins)?,
                n,
                seed,
            )?;
            let text = render_instance(&instance);
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Graph {
            instance,
            dot,
            json,
        } => {
            let text = std::fs::read_to_string(&instance)?;
            let inst = parse_instance(&text)?;
            let (graph, stats) = pipeline::build_graph(&inst)?;
            println!(
                "vertices {} arcs {} (removed {:.2}% vertices, {:.2}% arcs)",
                stats.num_vertices,
                stats.num_arcs,
                stats.pct_vertices_removed,
                stats.pct_arcs_removed
            );
            if let Some(path) = dot {
                std::fs::write(&path, export_dot(&graph))?;
                eprintln!("dot written to {}", path.display());
            }
            if let Some(path) = json {
                std::fs::write(&path, export_json(&graph))?;
                eprintln!("json written to {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { instance, solution } => {
            let inst = parse_instance(&std::fs::read_to_string(&instance)?)?;
            let sol = parse_text(&std::fs::read_to_string(&solution)?, &inst)?;
            let j = mvbp_core::model::default_j(&inst);
            let verdict = validate(&sol, &inst, &j);
            if verdict.passed() {
                println!("valid: cost {}", cost_to_string(&sol.total_cost));
                Ok(ExitCode::SUCCESS)
            } else {
                for violation in &verdict.violations {
                    println!("violation: {violation}");
                }
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
