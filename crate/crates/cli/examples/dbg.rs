fn main() {
    let master = 3u64;
    for i in 0..3usize {
        let inst_seed = uldpack_cli::suites::instance_seed(master, 10 * 1000 + i);
        let mut inst = uldpack::synth::air_cargo_instance(inst_seed, 10, true, true);
        for t in &mut inst.ulds {
            t.uld.edge_width = 10;
            t.uld.edge_offset = 10;
            t.uld.substructure_allowed = true;
            t.count = Some(1);
        }
        let (packing, mut algo) =
            uldpack_cli::suites::suite_params(uldpack_cli::suites::Suite::Ablation);
        let seed = uldpack_cli::suites::instance_seed(master, i);
        let base = uldpack_cli::suites::solve_one(&inst, &packing, &algo, seed);
        algo.variant.crainic_mimic = true;
        let cr = uldpack_cli::suites::solve_one(&inst, &packing, &algo, seed);
        println!(
            "inst {i}: default {}/{} items, {} ULDs, util {:.1} | crainic {}/{} items, {} ULDs, util {:.1}",
            base.solution.loaded_item_count(), inst.items.len(), base.solution.loads.len(), base.total_utilization,
            cr.solution.loaded_item_count(), inst.items.len(), cr.solution.loads.len(), cr.total_utilization,
        );
        for (li, load) in cr.solution.loads.iter().enumerate() {
            println!("  crainic load {li}: uld {} sub {} items {}", inst.ulds[load.uld_type].uld.id, load.substructure_used, load.item_count());
        }
    }
}
