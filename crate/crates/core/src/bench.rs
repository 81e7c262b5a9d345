//! Benchmark harness over the generated variable-sized bin packing
//! classes: build, solve and validate every instance of a class grid,
//! aggregate per-class means and render them as a table and as CSV.

use serde::Serialize;

use crate::error::Result;
use crate::instance::{generate_instance, BinClass, RangeClass};
use crate::pipeline;
use crate::solve::{BackendConfig, SolveStatus};

/// One cell of the benchmark grid.
#[derive(Debug, Clone, Copy)]
pub struct BenchClass {
    pub range: RangeClass,
    pub bins: BinClass,
    pub n: u64,
}

/// The full grid: three weight ranges, two bin classes, five sizes.
pub fn default_grid() -> Vec<BenchClass> {
    let mut grid = Vec::new();
    for range in [RangeClass::X1, RangeClass::X2, RangeClass::X3] {
        for bins in [BinClass::Q3, BinClass::Q5] {
            for n in [25, 50, 100, 200, 500] {
                grid.push(BenchClass { range, bins, n });
            }
        }
    }
    grid
}

/// Aggregated results for one class.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub range: u32,
    pub q: u32,
    pub n: u64,
    pub instances: usize,
    pub solved: usize,
    pub mean_m: f64,
    pub mean_vertices: f64,
    pub mean_arcs: f64,
    pub mean_pct_vertices_removed: f64,
    pub mean_pct_arcs_removed: f64,
    /// Means over solved instances; absent when the class is partial.
    pub mean_bb_nodes: Option<f64>,
    pub mean_time_model: Option<f64>,
    pub mean_time_total: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub max_time_total: f64,
    pub total_instances: usize,
    pub total_solved: usize,
}

fn mix_seed(base: u64, range: u32, q: u32, n: u64, k: u64) -> u64 {
    let mut x = base
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((range as u64) << 48)
        .wrapping_add((q as u64) << 40)
        .wrapping_add(n << 16)
        .wrapping_add(k);
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Runs every class with `seeds_per_class` instances each.  Failures mark
/// the row as partial instead of skewing the means.
pub fn run_bench(
    classes: &[BenchClass],
    seeds_per_class: u64,
    base_seed: u64,
    config: &BackendConfig,
) -> Result<BenchReport> {
    let mut rows = Vec::with_capacity(classes.len());
    let mut max_time_total = 0.0f64;
    let mut total_solved = 0usize;
    for class in classes {
        let mut m_sum = 0.0;
        let mut v_sum = 0.0;
        let mut a_sum = 0.0;
        let mut pv_sum = 0.0;
        let mut pa_sum = 0.0;
        let mut bb_sum = 0.0;
        let mut tm_sum = 0.0;
        let mut tt_sum = 0.0;
        let mut solved = 0usize;
        let mut note: Option<String> = None;
        for k in 0..seeds_per_class {
            let seed = mix_seed(base_seed, class.range.index(), class.bins.count(), class.n, k);
            let instance = generate_instance(class.range, class.bins, class.n, seed)?;
            m_sum += instance.num_items() as f64;
            match pipeline::run(&instance, config) {
                Ok(result) => {
                    v_sum += result.stats.num_vertices as f64;
                    a_sum += result.stats.num_arcs as f64;
                    pv_sum += result.stats.pct_vertices_removed;
                    pa_sum += result.stats.pct_arcs_removed;
                    if result.report.status == SolveStatus::Optimal {
                        solved += 1;
                        bb_sum += result.report.bb_nodes as f64;
                        tm_sum += result.report.time_model.as_secs_f64();
                        let total = result.report.time_total.as_secs_f64();
                        tt_sum += total;
                        max_time_total = max_time_total.max(total);
                    } else if note.is_none() {
                        note = result.report.message.clone().or_else(|| {
                            Some(format!("solver status {:?}", result.report.status))
                        });
                    }
                }
                Err(e) => {
                    if note.is_none() {
                        note = Some(e.to_string());
                    }
                }
            }
        }
        let count = seeds_per_class as usize;
        let full = solved == count;
        total_solved += solved;
        rows.push(BenchRow {
            range: class.range.index(),
            q: class.bins.count(),
            n: class.n,
            instances: count,
            solved,
            mean_m: m_sum / count as f64,
            mean_vertices: v_sum / count as f64,
            mean_arcs: a_sum / count as f64,
            mean_pct_vertices_removed: pv_sum / count as f64,
            mean_pct_arcs_removed: pa_sum / count as f64,
            mean_bb_nodes: full.then(|| bb_sum / count as f64),
            mean_time_model: full.then(|| tm_sum / count as f64),
            mean_time_total: full.then(|| tt_sum / count as f64),
            note,
        });
    }
    Ok(BenchReport {
        total_instances: classes.len() * seeds_per_class as usize,
        total_solved,
        rows,
        max_time_total,
    })
}

fn opt(value: Option<f64>, width: usize, precision: usize) -> String {
    match value {
        Some(v) => format!("{v:>width$.precision$}"),
        None => format!("{:>width$}", "-"),
    }
}

/// Aligned text table, one row per class.
pub fn render_table(report: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:>5} {:>2} {:>4} {:>6} {:>8} {:>9} {:>6} {:>6} {:>7} {:>8} {:>8}  {}\n",
        "range", "q", "n", "m", "#v", "#a", "%v", "%a", "n_bb", "t_ip", "t_tot", "note"
    ));
    for row in &report.rows {
        out.push_str(&format!(
            "{:>5} {:>2} {:>4} {:>6.1} {:>8.1} {:>9.1} {:>6.2} {:>6.2} {} {} {}  {}\n",
            format!("X={}", row.range),
            row.q,
            row.n,
            row.mean_m,
            row.mean_vertices,
            row.mean_arcs,
            row.mean_pct_vertices_removed,
            row.mean_pct_arcs_removed,
            opt(row.mean_bb_nodes, 7, 1),
            opt(row.mean_time_model, 8, 3),
            opt(row.mean_time_total, 8, 3),
            row.note.as_deref().unwrap_or(""),
        ));
    }
    out.push_str(&format!(
        "solved {}/{} instances; max single-instance time {:.3}s\n",
        report.total_solved, report.total_instances, report.max_time_total
    ));
    out
}

/// Comma-separated rows with a header, timing columns empty on partial
/// rows.
pub fn render_csv(report: &BenchReport) -> String {
    let mut out = String::from(
        "range,q,n,instances,solved,m,vertices,arcs,pct_v_removed,pct_a_removed,bb_nodes,t_ip,t_tot,note\n",
    );
    for row in &report.rows {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{:.2},{:.2},{:.2},{:.4},{:.4},{},{},{},{}\n",
            row.range,
            row.q,
            row.n,
            row.instances,
            row.solved,
            row.mean_m,
            row.mean_vertices,
            row.mean_arcs,
            row.mean_pct_vertices_removed,
            row.mean_pct_arcs_removed,
            fmt(row.mean_bb_nodes),
            fmt(row.mean_time_model),
            fmt(row.mean_time_total),
            row.note.as_deref().unwrap_or(""),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_has_thirty_classes() {
        assert_eq!(default_grid().len(), 30);
    }

    #[test]
    fn single_class_single_seed() {
        let classes = [BenchClass {
            range: RangeClass::X3,
            bins: BinClass::Q3,
            n: 25,
        }];
        let report = run_bench(&classes, 1, 7, &BackendConfig::builtin()).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].solved, 1);
        assert!(report.rows[0].mean_time_total.is_some());
        let table = render_table(&report);
        assert!(table.contains("X=3"));
    }

    #[test]
    fn bench_is_reproducible() {
        let classes = [BenchClass {
            range: RangeClass::X3,
            bins: BinClass::Q5,
            n: 50,
        }];
        let a = run_bench(&classes, 2, 11, &BackendConfig::builtin()).unwrap();
        let b = run_bench(&classes, 2, 11, &BackendConfig::builtin()).unwrap();
        assert_eq!(a.rows[0].mean_vertices, b.rows[0].mean_vertices);
        assert_eq!(a.rows[0].mean_arcs, b.rows[0].mean_arcs);
        assert_eq!(a.rows[0].mean_bb_nodes, b.rows[0].mean_bb_nodes);
    }
}
