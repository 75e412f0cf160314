//! `endonet` command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage, configuration or validation
//! errors, 1 for runtime failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use endonet_core::io::config::{load_config, parse_override, ConfigKind, ModelConfig};
use endonet_core::io::graph::{export_dot, export_edge_list};
use endonet_core::io::results::{
    run_metadata, sweep_aggregate_table, sweep_records_table, write_results, Cell, Format, ResultTable,
};
use endonet_core::presets::{self, Preset};
use endonet_core::reinforcement::{simulate_model1, summarize};
use endonet_core::seed::{entropy_seed, replication_rng};
use endonet_core::sweep::{run_sweep, SweepSpec};
use endonet_core::tribes::simulate_model2;
use endonet_core::{generate_bb, FitnessVector, SocialGraph};

#[derive(Parser, Debug)]
#[command(name = "endonet", version, about = "Endogenous social-network simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// One replication of the reinforcement model: trajectory and final fitness.
    #[command(name = "model1-run")]
    Model1Run(RunArgs),
    /// Monte Carlo sweep of the reinforcement model.
    #[command(name = "model1-sweep")]
    Model1Sweep(RunArgs),
    /// One replication of the tribes model: per-period metrics and final graph.
    #[command(name = "model2-run")]
    Model2Run(RunArgs),
    /// Monte Carlo sweep of the tribes model.
    #[command(name = "model2-sweep")]
    Model2Sweep(RunArgs),
    /// Write a network snapshot as DOT and edge list.
    #[command(name = "export-graph")]
    ExportGraph(ExportArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Configuration file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset; see `endonet presets`.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Override a model key, e.g. `--set epsilon=0.3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the machine's parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    /// Replications per grid point.
    #[arg(long)]
    replications: Option<usize>,
    /// Table format.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Use the literal sum form of the exchange condition, |f_a + f_b| <= epsilon.
    #[arg(long)]
    strict_eq4: bool,
    /// Leave the generation timestamp out of JSON metadata.
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args, Debug, Clone)]
struct ExportArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Export the network before any dynamics instead of after the last period.
    #[arg(long)]
    initial: bool,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Model {
    One,
    Two,
}

/// Fully resolved invocation: the sweep to run plus how to report it.
struct Resolved {
    sweep: SweepSpec,
    preset: Option<Preset>,
    format: Format,
}

fn config_err(e: endonet_core::Error) -> anyhow::Error {
    if e.is_config_error() {
        usage(e.to_string())
    } else {
        e.into()
    }
}

fn resolve(args: &RunArgs, want: Model) -> anyhow::Result<Resolved> {
    let format: Format = args.format.parse().map_err(config_err)?;
    let (mut sweep, preset, mut seed_given) = match (&args.preset, &args.config) {
        (Some(name), _) => {
            let p = presets::preset(name).ok_or_else(|| {
                usage(format!("unknown preset `{name}`; known presets: {}", presets::NAMES.join(", ")))
            })?;
            (p.sweep.clone(), Some(p), true)
        }
        (None, Some(path)) => {
            let loaded = load_config(path).map_err(config_err)?;
            let sweep = match loaded.kind {
                ConfigKind::Model1(c) => SweepSpec::single(ModelConfig::Model1(c)),
                ConfigKind::Model2(c) => SweepSpec::single(ModelConfig::Model2(c)),
                ConfigKind::Sweep(s) => s,
            };
            (sweep, None, loaded.seed_given)
        }
        (None, None) => return Err(usage("give --config FILE or --preset NAME")),
    };

    match (&sweep.base, want) {
        (ModelConfig::Model1(_), Model::One) | (ModelConfig::Model2(_), Model::Two) => {}
        (base, _) => {
            return Err(usage(format!(
                "configuration is for {} but the subcommand needs {}",
                base.section(),
                if want == Model::One { "model1" } else { "model2" }
            )))
        }
    }

    for text in &args.overrides {
        let (key, value) = parse_override(text).map_err(config_err)?;
        if key == "seed" {
            seed_given = true;
        }
        sweep.base.set(&key, &value).map_err(config_err)?;
    }
    if let Some(r) = args.replications {
        sweep.base.set("replications", &r.to_string()).map_err(config_err)?;
    }
    if args.strict_eq4 {
        if want == Model::One {
            return Err(usage("--strict-eq4 only applies to model2"));
        }
        sweep.base.set("strict_eq4", "true").map_err(config_err)?;
    }
    if let Some(seed) = args.seed {
        sweep.base.set("seed", &seed.to_string()).map_err(config_err)?;
        seed_given = true;
    }
    if !seed_given {
        sweep.base.set("seed", &entropy_seed().to_string()).map_err(config_err)?;
    }
    sweep.base.validate().map_err(config_err)?;
    sweep.grid().map_err(config_err)?;
    if args.jobs == Some(0) {
        return Err(usage("--jobs must be at least 1"));
    }
    Ok(Resolved { sweep, preset, format })
}

fn announce(r: &Resolved) {
    println!("master seed: {}", r.sweep.master_seed());
    if let Some(p) = &r.preset {
        println!("preset {}: {}", p.name, p.summary);
        println!("artifact-chosen parameters (not reported in the original experiments):");
        for (k, v) in &p.chosen {
            println!("  {k} = {v}");
        }
    }
}

fn metadata(r: &Resolved, args: &RunArgs) -> Value {
    let mut meta = run_metadata(r.sweep.master_seed(), &r.sweep);
    if let Some(p) = &r.preset {
        meta["preset"] = json!(p.name);
        meta["artifact_chosen"] = json!(p.chosen.iter().map(|(k, v)| json!({"parameter": k, "value": v})).collect::<Vec<_>>());
    }
    if !args.no_timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        meta["generated_at_unix"] = json!(secs);
    }
    meta
}

fn prepare_out(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

fn write_table(table: &ResultTable, dir: &Path, stem: &str, format: Format) -> anyhow::Result<PathBuf> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    write_results(table, &path, format)?;
    println!("wrote {}", path.display());
    Ok(path)
}

/// Seed and config as comment lines for graph files.
fn graph_header(r: &Resolved, config: &ModelConfig) -> Vec<String> {
    vec![
        format!("endonet {} graph snapshot", env!("CARGO_PKG_VERSION")),
        format!("master_seed: {}", r.sweep.master_seed()),
        format!("config: {}", serde_json::to_string(config).unwrap_or_default()),
    ]
}

fn with_seed_columns(table: &mut ResultTable, seed: u64, config: &ModelConfig) {
    let compact = serde_json::to_string(config).unwrap_or_default();
    table.columns.push("master_seed".into());
    table.columns.push("config".into());
    for row in &mut table.rows {
        row.push(Cell::Text(seed.to_string()));
        row.push(Cell::Text(compact.clone()));
    }
}

fn model1_run(args: &RunArgs) -> anyhow::Result<()> {
    let r = resolve(args, Model::One)?;
    announce(&r);
    let ModelConfig::Model1(config) = &r.sweep.base else { unreachable!() };
    prepare_out(&args.out)?;
    let run = simulate_model1(config, &mut replication_rng(config.master_seed, 0, 0))?;
    let meta = metadata(&r, args);

    let mut traj = ResultTable::new(
        ["period", "mean", "max_to_median", "max_to_min", "min", "max"].map(String::from).to_vec(),
    );
    traj.metadata = meta.clone();
    for (t, f) in run.trajectory.iter().enumerate() {
        let s = summarize(f);
        let min = f.iter().copied().fold(f64::INFINITY, f64::min);
        let max = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        traj.push(vec![
            Cell::Int(t as i64),
            Cell::Float(s.mean),
            s.max_to_median.into(),
            s.max_to_min.into(),
            Cell::Float(min),
            Cell::Float(max),
        ]);
    }
    with_seed_columns(&mut traj, config.master_seed, &r.sweep.base);
    write_table(&traj, &args.out, "model1_trajectory", r.format)?;

    let mut fin = ResultTable::new(["agent", "fitness", "shocks", "mean_degree"].map(String::from).to_vec());
    fin.metadata = meta;
    let periods = config.periods.max(1) as f64;
    for (i, f) in run.final_fitness().iter().enumerate() {
        fin.push(vec![
            Cell::Int(i as i64),
            Cell::Float(*f),
            Cell::Int(run.total_hits[i] as i64),
            Cell::Float(run.degree_sums[i] as f64 / periods),
        ]);
    }
    with_seed_columns(&mut fin, config.master_seed, &r.sweep.base);
    write_table(&fin, &args.out, "model1_final", r.format)?;

    let s = summarize(run.final_fitness());
    let show = |v: Option<f64>| v.map_or("undefined".to_string(), |x| format!("{x:.4}"));
    println!(
        "average fit {:.4}, max/median {}, max/min {}",
        s.mean,
        show(s.max_to_median),
        show(s.max_to_min)
    );
    if run.degenerate_periods > 0 {
        println!("note: {} period(s) had all-zero fitness and used uniform attachment", run.degenerate_periods);
    }
    Ok(())
}

fn sweep_cmd(args: &RunArgs, want: Model) -> anyhow::Result<()> {
    let r = resolve(args, want)?;
    announce(&r);
    prepare_out(&args.out)?;
    let points = r.sweep.grid()?.len();
    println!("{} grid point(s) x {} replication(s)", points, r.sweep.replications());
    let result = run_sweep(&r.sweep, args.jobs)?;
    let meta = metadata(&r, args);
    let stem = if want == Model::One { "model1" } else { "model2" };
    write_table(&sweep_aggregate_table(&result, meta.clone()), &args.out, &format!("{stem}_aggregate"), r.format)?;
    write_table(&sweep_records_table(&result, meta), &args.out, &format!("{stem}_records"), r.format)?;

    for row in &result.rows {
        let mean = row.mean.map_or("-".to_string(), |m| format!("{m:.4}"));
        let std = row.std.map_or("-".to_string(), |s| format!("{s:.4}"));
        let undefined = if row.undefined > 0 { format!(" ({} undefined)", row.undefined) } else { String::new() };
        println!("{:<28} {:<24} {mean:>10} ± {std:<8}{undefined}", row.label, row.metric);
    }
    Ok(())
}

fn write_graph(r: &Resolved, graph: &SocialGraph, fitness: &[f64], dir: &Path, stem: &str) -> anyhow::Result<()> {
    let header = graph_header(r, &r.sweep.base);
    let dot = dir.join(format!("{stem}.dot"));
    export_dot(graph, fitness, &dot, &header)?;
    println!("wrote {}", dot.display());
    let edges = dir.join(format!("{stem}.edges"));
    export_edge_list(graph, &edges, &header)?;
    println!("wrote {}", edges.display());
    Ok(())
}

fn model2_run(args: &RunArgs) -> anyhow::Result<()> {
    let r = resolve(args, Model::Two)?;
    announce(&r);
    let ModelConfig::Model2(config) = &r.sweep.base else { unreachable!() };
    prepare_out(&args.out)?;
    let tribes = simulate_model2(config, &mut replication_rng(config.master_seed, 0, 0))?;
    let meta = metadata(&r, args);

    let mut periods = ResultTable::new(
        ["period", "successes", "deaths", "collisions", "group_count", "component_count"]
            .map(String::from)
            .to_vec(),
    );
    periods.metadata = meta.clone();
    for (t, m) in tribes.periods.iter().enumerate() {
        periods.push(vec![
            Cell::Int(t as i64 + 1),
            Cell::Int(m.successes as i64),
            Cell::Int(m.deaths as i64),
            Cell::Int(m.collisions as i64),
            Cell::Int(m.group_count as i64),
            Cell::Int(m.component_count as i64),
        ]);
    }
    with_seed_columns(&mut periods, config.master_seed, &r.sweep.base);
    if !periods.rows.is_empty() {
        write_table(&periods, &args.out, "model2_periods", r.format)?;
    }

    let mut fitness = ResultTable::new(["agent", "initial_fitness", "final_fitness", "degree"].map(String::from).to_vec());
    fitness.metadata = meta;
    for i in 0..config.n {
        fitness.push(vec![
            Cell::Int(i as i64),
            Cell::Float(tribes.initial_fitness[i]),
            Cell::Float(tribes.final_fitness[i]),
            Cell::Int(tribes.final_graph.degree(i.into()) as i64),
        ]);
    }
    with_seed_columns(&mut fitness, config.master_seed, &r.sweep.base);
    write_table(&fitness, &args.out, "model2_fitness", r.format)?;
    write_graph(&r, &tribes.final_graph, &tribes.final_fitness, &args.out, "model2_final")?;

    println!(
        "final: {} group(s), {} component(s), {:.3} deaths per period",
        tribes.final_group_count(config.group_gap),
        tribes.final_component_count(),
        tribes.mean_deaths_per_period().unwrap_or(0.0)
    );
    Ok(())
}

fn export_graph(args: &ExportArgs) -> anyhow::Result<()> {
    let base_model = match (&args.run.preset, &args.run.config) {
        (Some(name), _) => presets::preset(name).map(|p| p.sweep.base),
        (None, Some(path)) => Some(load_config(path).map_err(config_err)?.model()),
        (None, None) => None,
    };
    let want = match base_model {
        Some(ModelConfig::Model1(_)) => Model::One,
        _ => Model::Two,
    };
    let r = resolve(&args.run, want)?;
    announce(&r);
    prepare_out(&args.run.out)?;
    let mut rng = replication_rng(r.sweep.master_seed(), 0, 0);
    let (graph, fitness): (SocialGraph, FitnessVector) = match &r.sweep.base {
        ModelConfig::Model1(c) => {
            let fitness = FitnessVector::constant(c.n, c.initial_fitness);
            (generate_bb(c.n, &c.bb, &fitness, &mut rng)?, fitness)
        }
        ModelConfig::Model2(c) => {
            let mut config = c.clone();
            if args.initial {
                config.periods = 0;
            }
            let t = simulate_model2(&config, &mut rng)?;
            (t.final_graph, t.final_fitness)
        }
    };
    write_graph(&r, &graph, &fitness, &args.run.out, "graph")?;
    println!("{} nodes, {} edges, {} component(s)", graph.node_count(), graph.edge_count(), graph.component_count());
    Ok(())
}

fn list_presets() -> anyhow::Result<()> {
    for p in presets::all() {
        let kind = match (p.model(), p.single_run) {
            (ModelConfig::Model1(_), _) => "model1-sweep",
            (ModelConfig::Model2(_), true) => "model2-run",
            (ModelConfig::Model2(_), false) => "model2-sweep",
        };
        println!("{:<14} {:<13} {}", p.name, kind, p.summary);
        for (k, v) in &p.chosen {
            println!("{:<28}{k} = {v}", "");
        }
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Model1Run(a) => model1_run(&a),
        Command::Model1Sweep(a) => sweep_cmd(&a, Model::One),
        Command::Model2Run(a) => model2_run(&a),
        Command::Model2Sweep(a) => sweep_cmd(&a, Model::Two),
        Command::ExportGraph(a) => export_graph(&a),
        Command::Presets => list_presets(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
