use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use uldpack::io::{
    br_to_instance, export_scene, parse_br, parse_instance_json, parse_plan, plan_to_solution,
    write_instance_json, write_plan,
};
use uldpack::validate::validate;

use uldpack_cli::params::{apply_param, apply_variant, load_env_config};
use uldpack_cli::suites::{run_suite, solve_one, DataSource, Suite};

#[derive(Parser)]
#[command(
    name = "uldpack",
    about = "3D air-cargo bin packing: solver, validator, and benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Br,
    Paquay,
    AdaptedUnlimited,
    #[value(name = "adapted-1uld")]
    Adapted1Uld,
    Ablation,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Br => Suite::Br,
            SuiteArg::Paquay => Suite::Paquay,
            SuiteArg::AdaptedUnlimited => Suite::AdaptedUnlimited,
            SuiteArg::Adapted1Uld => Suite::Adapted1Uld,
            SuiteArg::Ablation => Suite::Ablation,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Obj,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance file and write a load plan.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Parameter override, key=value (repeatable).
        #[arg(long = "param")]
        params: Vec<String>,
        /// Algorithm variant switch (repeatable).
        #[arg(long = "variant")]
        variants: Vec<String>,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        /// Additionally export the scene mesh to this path.
        #[arg(long)]
        scene: Option<PathBuf>,
    },
    /// Run a benchmark suite and emit its summary tables.
    Bench {
        suite: SuiteArg,
        /// Directory with canonical instance files (`br/*.txt`,
        /// `paquay/*.json`).
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Use the seeded synthetic instance generator instead of files.
        #[arg(long)]
        synthetic: bool,
        /// Instances per group for the synthetic generator.
        #[arg(long, default_value_t = 100)]
        per_group: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
        /// Directory for CSV tables.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for per-instance plan files.
        #[arg(long)]
        plans: Option<PathBuf>,
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Re-check a plan against its instance and report violations.
    Validate {
        instance: PathBuf,
        plan: PathBuf,
    },
    /// Convert a single-container text instance file into instance JSON.
    Convert {
        input: PathBuf,
        /// Output directory for the JSON files.
        #[arg(long)]
        out: PathBuf,
        /// Convert only this instance number (1-based).
        #[arg(long)]
        index: Option<usize>,
    },
}

fn cmd_solve(
    instance_path: PathBuf,
    seed: u64,
    params: Vec<String>,
    variants: Vec<String>,
    out: Option<PathBuf>,
    format: OutputFormat,
    scene: Option<PathBuf>,
) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&instance_path)
        .with_context(|| format!("reading {}", instance_path.display()))?;
    let instance = parse_instance_json(&text)
        .with_context(|| format!("parsing {}", instance_path.display()))?;
    let mut packing = instance.packing;
    let mut algo = instance.algo;
    load_env_config(&mut packing, &mut algo)?;
    for p in &params {
        apply_param(&mut packing, &mut algo, p)?;
    }
    for v in &variants {
        apply_variant(&mut algo, v)?;
    }

    let record = solve_one(&instance, &packing, &algo, seed);
    let solution = &record.solution;
    let output = match format {
        OutputFormat::Json => write_plan(&instance, solution, seed),
        OutputFormat::Obj => export_scene(&instance, solution),
        OutputFormat::Csv => {
            let mut csv = String::from("uld,substructure,items,utilization,cog_violated\n");
            for (load, m) in solution.loads.iter().zip(&record.loads) {
                csv.push_str(&format!(
                    "{},{},{},{:.2},{}\n",
                    instance.ulds[load.uld_type].uld.id,
                    load.substructure_used,
                    load.item_count(),
                    m.utilization,
                    m.cog_violated,
                ));
            }
            csv
        }
    };
    match &out {
        Some(path) => std::fs::write(path, &output)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{output}"),
    }
    if let Some(path) = &scene {
        std::fs::write(path, export_scene(&instance, solution))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    eprintln!(
        "{}: {} ULDs, {}/{} items loaded, total utilization {:.1}%, {:.0} ms",
        instance.name,
        solution.loads.len(),
        solution.loaded_item_count(),
        instance.items.len(),
        record.total_utilization,
        record.millis,
    );
    Ok(if solution.unloaded.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    suite: Suite,
    dir: Option<PathBuf>,
    synthetic: bool,
    per_group: usize,
    seed: u64,
    threads: Option<usize>,
    out: Option<PathBuf>,
    plans: Option<PathBuf>,
    params: Vec<String>,
) -> Result<ExitCode> {
    let source = if synthetic {
        DataSource::Synthetic { per_group }
    } else {
        match dir {
            Some(d) => DataSource::Dir(d),
            None => bail!("either --dir with instance files or --synthetic is required"),
        }
    };
    let outcome = run_suite(suite, &source, seed, threads, &params)?;
    println!(
        "suite {} [{} data], seed {seed}",
        suite.name(),
        outcome.data_label
    );
    println!("{}", outcome.table.to_text());
    for (name, table) in &outcome.extra_tables {
        println!("{name}:");
        println!("{}", table.to_text());
    }
    if let Some(dir) = &out {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.csv", suite.name()));
        std::fs::write(&path, outcome.table.to_csv())
            .with_context(|| format!("writing {}", path.display()))?;
        for (name, table) in &outcome.extra_tables {
            let path = dir.join(format!("{}_{name}.csv", suite.name()));
            std::fs::write(&path, table.to_csv())?;
        }
    }
    if let Some(dir) = &plans {
        outcome.write_plans(dir)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(instance_path: PathBuf, plan_path: PathBuf) -> Result<ExitCode> {
    let instance = parse_instance_json(
        &std::fs::read_to_string(&instance_path)
            .with_context(|| format!("reading {}", instance_path.display()))?,
    )?;
    let plan = parse_plan(
        &std::fs::read_to_string(&plan_path)
            .with_context(|| format!("reading {}", plan_path.display()))?,
    )?;
    let solution = plan_to_solution(&plan, &instance)?;
    let report = validate(&instance, &solution);
    for v in &report.violations {
        println!("violation: {v:?}");
    }
    for f in &report.cog_flags {
        println!(
            "cog deviation flag: load {} axis {} deviation {:.3}",
            f.load, f.axis, f.deviation
        );
    }
    if report.is_valid() {
        println!(
            "plan valid: {} loads, {} placements",
            solution.loads.len(),
            solution
                .loads
                .iter()
                .map(|l| l.placements.len())
                .sum::<usize>()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        println!("plan INVALID: {} violations", report.violations.len());
        Ok(ExitCode::from(2))
    }
}

fn cmd_convert(input: PathBuf, out: PathBuf, index: Option<usize>) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&input)
        .with_context(|| format!("reading {}", input.display()))?;
    let brs = parse_br(&text)?;
    std::fs::create_dir_all(&out)?;
    let stem = input
        .file_stem()
        .unwrap_or_default()
        .to_string_lossy()
        .to_string();
    let mut written = 0;
    for (i, br) in brs.iter().enumerate() {
        if index.is_some_and(|want| want != i + 1) {
            continue;
        }
        let name = format!("{stem}-{:03}", i + 1);
        let instance = br_to_instance(br, name.clone());
        let path = out.join(format!("{name}.json"));
        std::fs::write(&path, write_instance_json(&instance))
            .with_context(|| format!("writing {}", path.display()))?;
        written += 1;
    }
    if written == 0 {
        bail!("no instance matched");
    }
    eprintln!("wrote {written} instance files to {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            instance,
            seed,
            params,
            variants,
            out,
            format,
            scene,
        } => cmd_solve(instance, seed, params, variants, out, format, scene),
        Command::Bench {
            suite,
            dir,
            synthetic,
            per_group,
            seed,
            threads,
            out,
            plans,
            params,
        } => cmd_bench(
            suite.into(),
            dir,
            synthetic,
            per_group,
            seed,
            threads,
            out,
            plans,
            params,
        ),
        Command::Validate { instance, plan } => cmd_validate(instance, plan),
        Command::Convert { input, out, index } => cmd_convert(input, out, index),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
