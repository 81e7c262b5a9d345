// temporary probe
use mvbp_core::graph::{build_type_graph, compress_final, stitch};
use mvbp_core::instance::{generate_instance, BinClass, RangeClass};

fn main() {
    for (x, q) in [(RangeClass::X1, BinClass::Q5), (RangeClass::X3, BinClass::Q3), (RangeClass::X1, BinClass::Q3), (RangeClass::X2, BinClass::Q3)] {
        for n in [25u64, 50, 100, 200, 500] {
            let mut pv = 0.0; let mut pa = 0.0; let mut va = (0usize, 0usize); let mut pre = (0usize, 0usize);
            let seeds = 10;
            let t0 = std::time::Instant::now();
            for seed in 0..seeds {
                let inst = generate_instance(x, q, n, seed).unwrap();
                let graphs = (1..=q.count()).map(|t| build_type_graph(&inst, t).unwrap()).collect();
                let g = stitch(graphs).unwrap();
                let (c, stats) = compress_final(&g, &inst);
                pv += stats.pct_vertices_removed; pa += stats.pct_arcs_removed;
                va.0 += c.num_nodes(); va.1 += c.num_arcs();
                pre.0 += g.num_nodes(); pre.1 += g.num_arcs();
            }
            let k = seeds as f64;
            println!("X={:?} q={} n={:4}: pre #v={:7.1} #a={:8.1} | post #v={:7.1} #a={:8.1} | %v={:5.2} %a={:5.2} | {:.2}s",
                x, q.count(), n, pre.0 as f64/k, pre.1 as f64/k, va.0 as f64/k, va.1 as f64/k, pv/k, pa/k, t0.elapsed().as_secs_f64());
        }
    }
}
