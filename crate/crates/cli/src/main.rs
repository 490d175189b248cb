use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use friendcast::output::{self, SWEEP_FILE};
use friendcast::{run, Error, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "friendcast",
    version,
    about = "Broadcast information diffusion as an (N+1)-player game"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write snapshots, summary and manifest.
    Run(RunArgs),
    /// List the built-in scenarios.
    Scenarios,
    /// Run a parameter across several values and seeds.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Source {
    /// JSON config file (or a manifest from an earlier run).
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Built-in scenario to start from.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long = "snapshot-every")]
    snapshot_every: Option<u64>,
    /// Extra overrides as key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Also write actors.csv with one row per actor and snapshot.
    #[arg(long = "per-actor")]
    per_actor: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: Source,
    /// Parameter to vary.
    #[arg(long)]
    vary: String,
    /// Comma-separated values for the varied parameter.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<String>,
    /// Comma-separated seeds; every value runs with every seed.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Maximum number of runs in flight.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn resolve(source: &Source) -> friendcast::Result<ScenarioConfig> {
    let mut cfg = match (&source.config, &source.scenario) {
        (Some(path), _) => ScenarioConfig::load(path)?,
        (None, Some(name)) => ScenarioConfig::builtin(name)?,
        (None, None) => ScenarioConfig::default(),
    };
    if let Some(steps) = source.steps {
        cfg.n_steps = steps;
    }
    if let Some(every) = source.snapshot_every {
        cfg.snapshot_every = every;
    }
    for kv in &source.set {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override `{kv}` is not KEY=VALUE")))?;
        cfg.set_param(key.trim(), value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_run(args: &RunArgs) -> friendcast::Result<()> {
    let mut cfg = resolve(&args.source)?;
    if let Some(seed) = args.seed {
        cfg.rng_seed = seed;
    }
    let out = run(&cfg)?;
    let manifest = output::write_run(&args.out, &cfg, &out, args.per_actor)?;
    for path in &manifest.outputs {
        println!("wrote {}", args.out.join(path).display());
    }
    println!("wrote {}", args.out.join(output::MANIFEST_FILE).display());
    Ok(())
}

fn cmd_scenarios() {
    println!(
        "name\tkappa\trho\tpi\tn_actors\tn_assertions\tn_receivers\tn_steps\tsnapshot_every\ttiers"
    );
    for cfg in ScenarioConfig::builtins() {
        let tiers: Vec<String> = cfg
            .knowledge_tiers
            .iter()
            .map(|t| format!("{:.4}@{}", t.fraction, t.target_k))
            .collect();
        println!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            cfg.name,
            cfg.personality.kappa,
            cfg.personality.rho,
            cfg.personality.pi,
            cfg.n_actors,
            cfg.n_assertions,
            cfg.n_receivers,
            cfg.n_steps,
            cfg.snapshot_every,
            tiers.join(",")
        );
    }
}

fn cmd_sweep(args: &SweepArgs) -> friendcast::Result<()> {
    let cfg = resolve(&args.source)?;
    let rows = output::sweep(&cfg, &args.vary, &args.values, &args.seeds, args.jobs)?;
    std::fs::create_dir_all(&args.out)?;
    let path = args.out.join(SWEEP_FILE);
    std::fs::write(&path, output::sweep_csv(&rows))?;
    println!("wrote {} ({} runs)", path.display(), rows.len());
    Ok(())
}

fn report(err: &Error, out: &Path) -> ExitCode {
    eprintln!("error: {err}");
    if err.is_config() {
        ExitCode::from(1)
    } else {
        eprintln!("(output directory: {})", out.display());
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args).map_err(|e| report(&e, &args.out)),
        Command::Scenarios => {
            cmd_scenarios();
            Ok(())
        }
        Command::Sweep(args) => cmd_sweep(args).map_err(|e| report(&e, &args.out)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
