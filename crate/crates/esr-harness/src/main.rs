use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use esr_harness::csvio::write_csv;
use esr_harness::{build_env, run_experiment, ExperimentConfig, HarnessError, DEFAULT_RUNS};
use esr_mcts::config::{AlgorithmTag, EnvTag, RunConfig, DEFAULT_EXPLORATION};
use esr_mcts::UtilitySpec;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Persist {
    On,
    Off,
}

/// Run a planner on a benchmark environment and report per-episode utility
/// curves over independent seeded runs.
#[derive(Parser, Debug)]
#[command(name = "esr-harness", version)]
struct Cli {
    /// Environment: fishwood, stock, redeed, random-momdp, momab, single-arm.
    #[arg(long)]
    env: EnvTag,

    /// Planner: nlu-mcts or dmcts.
    #[arg(long)]
    algo: AlgorithmTag,

    /// Utility function, `name` or `name:param=value`.
    #[arg(long)]
    utility: UtilitySpec,

    /// Episodes per run.
    #[arg(long, default_value_t = 1000)]
    episodes: usize,

    /// Planning iterations per executed action.
    #[arg(long, default_value_t = 1)]
    n_exec: usize,

    /// Independent runs, each with its own RNG streams.
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: usize,

    /// Base seed; run r derives its planner and environment streams from
    /// (seed, r).
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// UCB exploration constant.
    #[arg(long = "C", default_value_t = DEFAULT_EXPLORATION)]
    exploration: f64,

    /// Bootstrap replicate count (dmcts).
    #[arg(long = "J", default_value_t = 100)]
    replicates: usize,

    /// Initial numerator of every bootstrap replicate (dmcts).
    #[arg(long, default_value_t = 1.0)]
    alpha_init: f64,

    /// Initial denominator of every bootstrap replicate (dmcts).
    #[arg(long, default_value_t = 1.0)]
    beta_init: f64,

    /// Keep the search tree and its statistics across episodes.
    #[arg(long, value_enum, default_value_t = Persist::On)]
    tree_persist: Persist,

    /// Write the utility curves to this CSV file.
    #[arg(long)]
    out: Option<PathBuf>,

    /// TOML file overriding the environment's default parameters.
    #[arg(long)]
    env_config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), HarnessError> {
    let mut run = RunConfig::new(cli.env, cli.algo);
    run.episodes = cli.episodes;
    run.n_exec = cli.n_exec;
    run.seed = cli.seed;
    run.exploration = cli.exploration;
    run.replicates = cli.replicates;
    run.alpha_init = cli.alpha_init;
    run.beta_init = cli.beta_init;
    run.tree_persistence = matches!(cli.tree_persist, Persist::On);
    let mut config = ExperimentConfig::new(run, cli.utility.clone());
    config.runs = cli.runs;

    let env = build_env(cli.env, cli.env_config.as_deref())?;
    let result = run_experiment(&env, &config)?;

    if let Some(path) = &cli.out {
        write_csv(&result, path)?;
        eprintln!("wrote {}", path.display());
    }
    println!(
        "env={} algo={} utility={} episodes={} runs={} seed={} final_mean={:.6} trailing_mean={:.6} trailing_stderr={:.6}",
        cli.env.name(),
        cli.algo.name(),
        cli.utility,
        result.episodes(),
        result.runs(),
        cli.seed,
        result.mean.last().copied().unwrap_or(f64::NAN),
        result.final_trailing_mean(),
        result.final_trailing_stderr(),
    );
    Ok(())
}
