//! Benchmark suites: the single-container set, the air-cargo comparison
//! set, its edge-adapted variants, and the algorithm-component ablation.
//! Each suite pins its published parameter preset, solves every instance
//! (optionally in parallel), and aggregates per-group tables.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use uldpack::fleet::load_fleet;
use uldpack::io::{br_to_instance, parse_br, parse_instance_json};
use uldpack::model::{X, Y};
use uldpack::rgs::cog_deviation;
use uldpack::{
    AlgoParams, CornerSupportMode, EpSortOrder, Instance, PackingParams, SortCriterion, Solution,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Br,
    Paquay,
    AdaptedUnlimited,
    Adapted1Uld,
    Ablation,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Br => "br",
            Suite::Paquay => "paquay",
            Suite::AdaptedUnlimited => "adapted_unlimited",
            Suite::Adapted1Uld => "adapted_1uld",
            Suite::Ablation => "ablation",
        }
    }
}

/// The published parameter presets per suite.
pub fn suite_params(suite: Suite) -> (PackingParams, AlgoParams) {
    let mut packing = PackingParams::default();
    let mut algo = AlgoParams::default();
    match suite {
        Suite::Br => {
            packing.min_item_overlap = 1.0;
            packing.max_padding_height = 0;
            packing.weight_balance_importance = 0.0;
            algo.ep_sort_order = EpSortOrder::Xyz;
        }
        Suite::Paquay => {
            packing.max_padding_height = 0;
            packing.weight_balance_importance = 100.0;
            packing.max_cog_deviation = 0.05;
            packing.corner_support_mode = CornerSupportMode::CornersOnly;
        }
        Suite::AdaptedUnlimited | Suite::Adapted1Uld | Suite::Ablation => {}
    }
    (packing, algo)
}

/// Edge adaptation applied to every ULD of an instance.
pub fn adapt_instance_edges(instance: &mut Instance) {
    for t in &mut instance.ulds {
        t.uld.edge_width = 10;
        t.uld.edge_offset = 10;
        t.uld.substructure_allowed = true;
    }
}

fn force_one_per_type(instance: &mut Instance) {
    for t in &mut instance.ulds {
        t.count = Some(1);
    }
}

fn force_unlimited(instance: &mut Instance) {
    for t in &mut instance.ulds {
        t.count = None;
    }
}

/// One benchmark instance with its group label (item-type count for the
/// single-container set, item count otherwise).
#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub group: usize,
    pub instance: Instance,
}

/// Stable per-instance RNG seed derived from the master seed.
pub fn instance_seed(master: u64, index: usize) -> u64 {
    (master ^ 0x5851F42D4C957F2D).wrapping_add((index as u64).wrapping_mul(0x9E3779B97F4A7C15))
}

/// Where benchmark data comes from: canonical files in a directory, or
/// the seeded synthetic generator.
#[derive(Debug, Clone)]
pub enum DataSource {
    Dir(PathBuf),
    Synthetic { per_group: usize },
}

impl DataSource {
    pub fn label(&self) -> &'static str {
        match self {
            DataSource::Dir(_) => "canonical",
            DataSource::Synthetic { .. } => "synthetic",
        }
    }
}

pub const BR_GROUPS: [usize; 7] = [3, 5, 8, 10, 12, 15, 20];
pub const ITEM_GROUPS: [usize; 10] = [10, 20, 30, 40, 50, 60, 70, 80, 90, 100];

/// Load the single-container set: every `*.txt` under `<dir>/br` (or the
/// directory itself), one file per group; or generate 7 x per_group
/// synthetic instances.
pub fn load_br_set(source: &DataSource, seed: u64) -> Result<Vec<BenchInstance>> {
    match source {
        DataSource::Dir(dir) => {
            let dir = existing_subdir(dir, "br")?;
            let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
                .with_context(|| format!("reading {}", dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "txt"))
                .collect();
            files.sort();
            if files.is_empty() {
                bail!("no .txt instance files under {}", dir.display());
            }
            let mut out = Vec::new();
            for file in files {
                let text = std::fs::read_to_string(&file)
                    .with_context(|| format!("reading {}", file.display()))?;
                let stem = file.file_stem().unwrap_or_default().to_string_lossy().to_string();
                for (i, br) in parse_br(&text)
                    .with_context(|| format!("parsing {}", file.display()))?
                    .iter()
                    .enumerate()
                {
                    let instance = br_to_instance(br, format!("{stem}-{:03}", i + 1));
                    out.push(BenchInstance {
                        group: br.types.len(),
                        instance,
                    });
                }
            }
            Ok(out)
        }
        DataSource::Synthetic { per_group } => {
            let mut out = Vec::new();
            for &j in &BR_GROUPS {
                for (i, br) in uldpack::synth::br_like_group(seed, j, *per_group)
                    .iter()
                    .enumerate()
                {
                    let instance = br_to_instance(br, format!("synbr{j}-{:03}", i + 1));
                    out.push(BenchInstance { group: j, instance });
                }
            }
            Ok(out)
        }
    }
}

fn existing_subdir(dir: &Path, sub: &str) -> Result<PathBuf> {
    let nested = dir.join(sub);
    if nested.is_dir() {
        return Ok(nested);
    }
    if dir.is_dir() {
        return Ok(dir.to_path_buf());
    }
    bail!("instance directory {} not found", dir.display());
}

/// Load the air-cargo set: every `*.json` under `<dir>/paquay` (or the
/// directory itself), or synthetic instances over the bundled ULD shapes.
pub fn load_air_cargo_set(source: &DataSource, seed: u64, edge: bool) -> Result<Vec<BenchInstance>> {
    match source {
        DataSource::Dir(dir) => {
            let dir = existing_subdir(dir, "paquay")?;
            let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
                .with_context(|| format!("reading {}", dir.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "json"))
                .collect();
            files.sort();
            if files.is_empty() {
                bail!("no .json instance files under {}", dir.display());
            }
            let mut out = Vec::new();
            for file in files {
                let text = std::fs::read_to_string(&file)
                    .with_context(|| format!("reading {}", file.display()))?;
                let instance = parse_instance_json(&text)
                    .with_context(|| format!("parsing {}", file.display()))?;
                out.push(BenchInstance {
                    group: instance.items.len(),
                    instance,
                });
            }
            Ok(out)
        }
        DataSource::Synthetic { per_group } => {
            let mut out = Vec::new();
            for &n in &ITEM_GROUPS {
                for i in 0..*per_group {
                    let inst_seed = instance_seed(seed, n * 1000 + i);
                    let instance = uldpack::synth::air_cargo_instance(inst_seed, n, edge, true);
                    out.push(BenchInstance { group: n, instance });
                }
            }
            Ok(out)
        }
    }
}

/// One solved instance with timing and per-load metrics.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub name: String,
    pub group: usize,
    pub solution: Solution,
    pub criteria: Vec<SortCriterion>,
    pub millis: f64,
    pub checks: u64,
    /// Per-load: utilization percent, CoG violated, substructure used.
    pub loads: Vec<LoadMetrics>,
    pub loaded_items: usize,
    pub total_utilization: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct LoadMetrics {
    pub utilization: f64,
    pub cog_violated: bool,
    pub substructure: bool,
}

/// Solve one instance under the given parameters.
pub fn solve_one(
    instance: &Instance,
    packing: &PackingParams,
    algo: &AlgoParams,
    seed: u64,
) -> RunRecord {
    use rand::SeedableRng;
    let mut algo = *algo;
    algo.rng_seed = seed;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    let outcome = load_fleet(&instance.items, &instance.ulds, packing, &algo, &mut rng);
    let millis = start.elapsed().as_secs_f64() * 1e3;
    let mut loads = Vec::new();
    let mut used_volume = 0i64;
    let mut loaded_volume = 0i64;
    for load in &outcome.solution.loads {
        let uld = &instance.ulds[load.uld_type].uld;
        let cog_violated = cog_deviation(load, uld, X, packing.max_cog_deviation) > 0.0
            || cog_deviation(load, uld, Y, packing.max_cog_deviation) > 0.0;
        loads.push(LoadMetrics {
            utilization: 100.0 * load.utilization(uld),
            cog_violated,
            substructure: load.substructure_used,
        });
        used_volume += uld.volume_capacity;
        loaded_volume += load.loaded_volume();
    }
    let total_utilization = if used_volume > 0 {
        100.0 * loaded_volume as f64 / used_volume as f64
    } else {
        0.0
    };
    RunRecord {
        name: instance.name.clone(),
        group: instance.items.len(),
        solution: outcome.solution,
        criteria: outcome.load_criteria,
        millis,
        checks: outcome.total_checks,
        loads,
        loaded_items: 0,
        total_utilization,
    }
}

/// Solve a whole set in parallel, deterministically seeded per instance.
pub fn solve_set(
    set: &[BenchInstance],
    packing: &PackingParams,
    algo: &AlgoParams,
    master_seed: u64,
    threads: Option<usize>,
) -> Vec<RunRecord> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .expect("thread pool");
    pool.install(|| {
        set.par_iter()
            .enumerate()
            .map(|(i, bi)| {
                let mut rec = solve_one(&bi.instance, packing, algo, instance_seed(master_seed, i));
                rec.group = bi.group;
                rec.loaded_items = rec.solution.loaded_item_count();
                rec
            })
            .collect()
    })
}

fn mean(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count();
    if n == 0 {
        return 0.0;
    }
    values.sum::<f64>() / n as f64
}

fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// A rendered table: header, rows, and a pre-formatted CSV body.
#[derive(Debug, Clone)]
pub struct TableOutput {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl TableOutput {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                widths[i] = widths[i].max(cell.len());
            }
        }
        let mut out = String::new();
        for (i, c) in self.columns.iter().enumerate() {
            out.push_str(&format!("{:>w$}  ", c, w = widths[i]));
        }
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                out.push_str(&format!("{:>w$}  ", cell, w = widths[i]));
            }
            out.push('\n');
        }
        out
    }
}

fn f1(v: f64) -> String {
    format!("{v:.1}")
}

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

/// Aggregate the single-container suite: per type-count group the mean,
/// minimum, and maximum utilization, solution times, and loaded items.
pub fn br_table(records: &[RunRecord]) -> TableOutput {
    let mut groups: Vec<usize> = records.iter().map(|r| r.group).collect();
    groups.sort();
    groups.dedup();
    let mut rows = Vec::new();
    for g in groups {
        let rs: Vec<&RunRecord> = records.iter().filter(|r| r.group == g).collect();
        let utils: Vec<f64> = rs
            .iter()
            .map(|r| r.loads.first().map_or(0.0, |l| l.utilization))
            .collect();
        rows.push(vec![
            g.to_string(),
            f1(mean(rs.iter().map(|r| r.solution.loaded_item_count() as f64
                + r.solution.unloaded.len() as f64))),
            f1(mean(utils.iter().copied())),
            f1(utils.iter().copied().fold(f64::INFINITY, f64::min)),
            f1(utils.iter().copied().fold(0.0, f64::max)),
            f1(mean(rs.iter().map(|r| r.millis))),
            f1(rs.iter().map(|r| r.millis).fold(0.0, f64::max)),
            f1(mean(rs.iter().map(|r| r.loaded_items as f64))),
        ]);
    }
    TableOutput {
        columns: vec!["J", "items", "u_mean", "u_min", "u_max", "t_mean", "t_max", "n_mean"],
        rows,
    }
}

/// Aggregate a multi-ULD suite: ULD counts, utilization statistics over
/// loaded ULDs, CoG violations, substructure usage, and timings.
pub fn air_cargo_table(records: &[RunRecord]) -> TableOutput {
    let mut groups: Vec<usize> = records.iter().map(|r| r.group).collect();
    groups.sort();
    groups.dedup();
    let mut rows = Vec::new();
    let mut tot_ulds = 0usize;
    let mut tot_vio = 0usize;
    let mut tot_sub = 0usize;
    for g in groups {
        let rs: Vec<&RunRecord> = records.iter().filter(|r| r.group == g).collect();
        let uld_count: usize = rs.iter().map(|r| r.loads.len()).sum();
        let utils: Vec<f64> = rs
            .iter()
            .flat_map(|r| r.loads.iter().map(|l| l.utilization))
            .collect();
        let vio: usize = rs
            .iter()
            .flat_map(|r| r.loads.iter())
            .filter(|l| l.cog_violated)
            .count();
        let sub: usize = rs
            .iter()
            .flat_map(|r| r.loads.iter())
            .filter(|l| l.substructure)
            .count();
        tot_ulds += uld_count;
        tot_vio += vio;
        tot_sub += sub;
        rows.push(vec![
            g.to_string(),
            uld_count.to_string(),
            format!("{:.1}", uld_count as f64 / rs.len().max(1) as f64),
            f1(median(utils.clone())),
            f1(mean(utils.iter().copied())),
            vio.to_string(),
            f1(100.0 * vio as f64 / uld_count.max(1) as f64),
            sub.to_string(),
            f1(mean(rs.iter().map(|r| r.millis))),
            f1(rs.iter().map(|r| r.millis).fold(0.0, f64::max)),
        ]);
    }
    rows.push(vec![
        "total".into(),
        tot_ulds.to_string(),
        String::new(),
        String::new(),
        String::new(),
        tot_vio.to_string(),
        f1(100.0 * tot_vio as f64 / tot_ulds.max(1) as f64),
        tot_sub.to_string(),
        String::new(),
        String::new(),
    ]);
    TableOutput {
        columns: vec![
            "items", "ulds", "ulds_mean", "u_med", "u_mean", "g_vio", "g_vio_pct", "subs",
            "t_mean", "t_max",
        ],
        rows,
    }
}

/// Sorting-criterion attribution: how often each criterion produced the
/// kept load.
pub fn criterion_table(records: &[RunRecord]) -> TableOutput {
    let mut counts = [0usize; 5];
    for r in records {
        for c in &r.criteria {
            let idx = SortCriterion::ALL.iter().position(|x| x == c).unwrap();
            counts[idx] += 1;
        }
    }
    TableOutput {
        columns: vec!["criterion", "best_for_ulds"],
        rows: SortCriterion::ALL
            .iter()
            .zip(counts)
            .map(|(c, n)| vec![c.label().to_string(), n.to_string()])
            .collect(),
    }
}

/// The ablation variants in report order.
pub const ABLATION_VARIANTS: [(&str, fn(&mut AlgoParams)); 4] = [
    ("no_grid", |a| a.variant.no_grid = true),
    ("no_blocking", |a| a.variant.no_blocking = true),
    ("no_moving", |a| a.variant.no_moving = true),
    ("crainic", |a| a.variant.crainic_mimic = true),
];

#[derive(Debug, Clone)]
pub struct AblationRecord {
    pub group: usize,
    /// (time ratio, utilization ratio) per variant, vs the default run.
    pub ratios: [(f64, f64); 4],
}

/// Run the default configuration and all four variants per instance with
/// identical seeds, reporting per-instance ratios.
pub fn run_ablation(
    set: &[BenchInstance],
    packing: &PackingParams,
    algo: &AlgoParams,
    master_seed: u64,
    threads: Option<usize>,
) -> Vec<AblationRecord> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .expect("thread pool");
    pool.install(|| {
        set.par_iter()
            .enumerate()
            .map(|(i, bi)| {
                let seed = instance_seed(master_seed, i);
                let base = solve_one(&bi.instance, packing, algo, seed);
                let mut ratios = [(1.0, 1.0); 4];
                for (vi, (_, enable)) in ABLATION_VARIANTS.iter().enumerate() {
                    let mut algo_v = *algo;
                    enable(&mut algo_v);
                    let run = solve_one(&bi.instance, packing, &algo_v, seed);
                    let t_ratio = run.millis / base.millis.max(1e-6);
                    let u_ratio = if base.total_utilization > 0.0 {
                        run.total_utilization / base.total_utilization
                    } else {
                        1.0
                    };
                    ratios[vi] = (t_ratio, u_ratio);
                }
                AblationRecord {
                    group: bi.group,
                    ratios,
                }
            })
            .collect()
    })
}

pub fn ablation_table(records: &[AblationRecord]) -> TableOutput {
    let mut groups: Vec<usize> = records.iter().map(|r| r.group).collect();
    groups.sort();
    groups.dedup();
    let mut rows = Vec::new();
    let row_for = |label: String, rs: &[&AblationRecord]| {
        let mut row = vec![label];
        for vi in 0..4 {
            row.push(f3(mean(rs.iter().map(|r| r.ratios[vi].0))));
            row.push(f3(mean(rs.iter().map(|r| r.ratios[vi].1))));
        }
        row
    };
    for g in &groups {
        let rs: Vec<&AblationRecord> = records.iter().filter(|r| r.group == *g).collect();
        rows.push(row_for(g.to_string(), &rs));
    }
    rows.push(row_for("total".into(), &records.iter().collect::<Vec<_>>()));
    TableOutput {
        columns: vec![
            "items", "t_ng", "u_ng", "t_nb", "u_nb", "t_nm", "u_nm", "t_cr", "u_cr",
        ],
        rows,
    }
}

/// Everything a bench invocation produced. `set` and `records` are
/// parallel for record-bearing suites (the ablation suite keeps only its
/// ratio table).
pub struct BenchOutcome {
    pub set: Vec<BenchInstance>,
    pub records: Vec<RunRecord>,
    pub table: TableOutput,
    pub extra_tables: Vec<(&'static str, TableOutput)>,
    pub data_label: &'static str,
    pub master_seed: u64,
}

impl BenchOutcome {
    /// Write one plan file per solved instance; bytes depend only on the
    /// instance and seed, never on timing.
    pub fn write_plans(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (i, (bi, record)) in self.set.iter().zip(&self.records).enumerate() {
            let seed = instance_seed(self.master_seed, i);
            let text = uldpack::io::write_plan(&bi.instance, &record.solution, seed);
            let name = record.name.replace(['/', ' '], "_");
            std::fs::write(dir.join(format!("{name}.plan.json")), text)?;
        }
        Ok(())
    }
}

/// Run one suite end to end.
pub fn run_suite(
    suite: Suite,
    source: &DataSource,
    master_seed: u64,
    threads: Option<usize>,
    param_overrides: &[String],
) -> Result<BenchOutcome> {
    let (mut packing, mut algo) = suite_params(suite);
    for p in param_overrides {
        crate::params::apply_param(&mut packing, &mut algo, p)?;
    }
    let data_label = source.label();
    match suite {
        Suite::Br => {
            let set = load_br_set(source, master_seed)?;
            let records = solve_set(&set, &packing, &algo, master_seed, threads);
            let table = br_table(&records);
            Ok(BenchOutcome {
                set,
                records,
                table,
                extra_tables: vec![],
                data_label,
                master_seed,
            })
        }
        Suite::Paquay => {
            let set = load_air_cargo_set(source, master_seed, false)?;
            let records = solve_set(&set, &packing, &algo, master_seed, threads);
            let table = air_cargo_table(&records);
            let criteria = criterion_table(&records);
            Ok(BenchOutcome {
                set,
                records,
                table,
                extra_tables: vec![("criteria", criteria)],
                data_label,
                master_seed,
            })
        }
        Suite::AdaptedUnlimited | Suite::Adapted1Uld => {
            let mut set = load_air_cargo_set(source, master_seed, true)?;
            for bi in &mut set {
                adapt_instance_edges(&mut bi.instance);
                if suite == Suite::Adapted1Uld {
                    force_one_per_type(&mut bi.instance);
                } else {
                    force_unlimited(&mut bi.instance);
                }
            }
            let records = solve_set(&set, &packing, &algo, master_seed, threads);
            let table = air_cargo_table(&records);
            let criteria = criterion_table(&records);
            Ok(BenchOutcome {
                set,
                records,
                table,
                extra_tables: vec![("criteria", criteria)],
                data_label,
                master_seed,
            })
        }
        Suite::Ablation => {
            let mut set = load_air_cargo_set(source, master_seed, true)?;
            for bi in &mut set {
                adapt_instance_edges(&mut bi.instance);
                force_one_per_type(&mut bi.instance);
            }
            let records = run_ablation(&set, &packing, &algo, master_seed, threads);
            let table = ablation_table(&records);
            Ok(BenchOutcome {
                set: Vec::new(),
                records: Vec::new(),
                table,
                extra_tables: vec![],
                data_label,
                master_seed,
            })
        }
    }
}
