//! Seeded, repeated planning experiments producing utility curves.

use esr_mcts::config::RunConfig;
use esr_mcts::rng::{env_rng, planner_rng};
use esr_mcts::{EnvironmentModel, PlanError, Planner, UtilitySpec, DEFAULT_REWARD_MATCH_TOL};
use rayon::prelude::*;

use crate::envcfg::BuiltEnv;
use crate::error::HarnessError;

pub const DEFAULT_RUNS: usize = 10;
pub const DEFAULT_TRAILING_WINDOW: usize = 100;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub run: RunConfig,
    /// Independent seeded repetitions; run r uses RNG streams derived from
    /// (seed, r), so adding runs never perturbs earlier ones.
    pub runs: usize,
    pub utility: UtilitySpec,
    /// Window for the trailing mean column reported alongside raw data.
    pub trailing_window: usize,
}

impl ExperimentConfig {
    pub fn new(run: RunConfig, utility: UtilitySpec) -> Self {
        ExperimentConfig {
            run,
            runs: DEFAULT_RUNS,
            utility,
            trailing_window: DEFAULT_TRAILING_WINDOW,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        self.run
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.runs == 0 {
            return Err(HarnessError::Config("runs must be at least 1".into()));
        }
        if self.trailing_window == 0 {
            return Err(HarnessError::Config(
                "trailing window must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    /// utilities[run][episode]
    pub utilities: Vec<Vec<f64>>,
    /// Per-episode mean over runs.
    pub mean: Vec<f64>,
    /// Per-episode standard error of the mean over runs.
    pub stderr: Vec<f64>,
    /// Trailing-window mean of the mean curve.
    pub trailing_mean: Vec<f64>,
    pub trailing_window: usize,
}

impl ExperimentResult {
    pub fn episodes(&self) -> usize {
        self.mean.len()
    }

    pub fn runs(&self) -> usize {
        self.utilities.len()
    }

    /// Mean utility over the final `window` episodes of the mean curve.
    pub fn final_trailing_mean(&self) -> f64 {
        *self
            .trailing_mean
            .last()
            .expect("experiments have at least one episode")
    }

    /// Standard error of the final trailing window, treating each run's
    /// own window mean as one observation.
    pub fn final_trailing_stderr(&self) -> f64 {
        let window = self.trailing_window.min(self.episodes());
        let per_run: Vec<f64> = self
            .utilities
            .iter()
            .map(|run| {
                let tail = &run[run.len() - window..];
                compensated_mean(tail)
            })
            .collect();
        standard_error(&per_run)
    }

    /// Standard deviation of the mean curve over the final window.
    pub fn final_trailing_std_of_curve(&self) -> f64 {
        let window = self.trailing_window.min(self.episodes());
        let tail = &self.mean[self.mean.len() - window..];
        sample_std(tail)
    }
}

/// Sum with Neumaier compensation: run order and float noise stay out of
/// the aggregate statistics.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

pub fn compensated_mean(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "mean of an empty slice");
    compensated_sum(values) / values.len() as f64
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = compensated_mean(values);
    let squared: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    (compensated_sum(&squared) / (values.len() - 1) as f64).sqrt()
}

fn standard_error(values: &[f64]) -> f64 {
    sample_std(values) / (values.len() as f64).sqrt()
}

/// Pooled standard error for comparing two independent estimates.
pub fn combined_stderr(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

fn classify(e: PlanError) -> HarnessError {
    match e {
        PlanError::Utility(u) => HarnessError::Config(u.to_string()),
        PlanError::Bts(b) => HarnessError::Config(b.to_string()),
        other => HarnessError::Runtime(other.to_string()),
    }
}

/// Run the configured experiment on a concrete environment: `runs`
/// independent repetitions of `episodes` episodes each, every run on its
/// own planner and its own pair of RNG streams.
pub fn run_planner_experiment<M>(
    model: &M,
    config: &ExperimentConfig,
) -> Result<ExperimentResult, HarnessError>
where
    M: EnvironmentModel + Sync,
{
    config.validate()?;
    // surface utility/posterior pairing problems before spending any time
    Planner::new(
        model,
        config.run.planner_kind(),
        config.utility.clone(),
        config.run.tree_persistence,
        DEFAULT_REWARD_MATCH_TOL,
    )
    .map(|_| ())
    .map_err(classify)?;
    let episodes = config.run.episodes;
    let utilities: Vec<Vec<f64>> = (0..config.runs)
        .into_par_iter()
        .map(|run| -> Result<Vec<f64>, HarnessError> {
            let mut planner = Planner::new(
                model,
                config.run.planner_kind(),
                config.utility.clone(),
                config.run.tree_persistence,
                DEFAULT_REWARD_MATCH_TOL,
            )
            .map_err(classify)?;
            let mut plan_stream = planner_rng(config.run.seed, run as u64);
            let mut env_stream = env_rng(config.run.seed, run as u64);
            let mut curve = Vec::with_capacity(episodes);
            for _ in 0..episodes {
                let result = planner
                    .run_episode(model, config.run.n_exec, &mut plan_stream, &mut env_stream)
                    .map_err(classify)?;
                curve.push(result.utility);
            }
            Ok(curve)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(aggregate(utilities, config.trailing_window))
}

/// `run_planner_experiment` dispatched over the environments the harness
/// can build from a tag.
pub fn run_experiment(
    env: &BuiltEnv,
    config: &ExperimentConfig,
) -> Result<ExperimentResult, HarnessError> {
    match env {
        BuiltEnv::Fishwood(e) => run_planner_experiment(e, config),
        BuiltEnv::Stock(e) => run_planner_experiment(e, config),
        BuiltEnv::Redeed(e) => run_planner_experiment(e, config),
        BuiltEnv::RandomMomdp(e) => run_planner_experiment(e, config),
        BuiltEnv::Momab(e) => run_planner_experiment(e, config),
        BuiltEnv::SingleArm(e) => run_planner_experiment(e, config),
    }
}

/// Build the derived statistics for a raw utility matrix.
pub fn aggregate(utilities: Vec<Vec<f64>>, trailing_window: usize) -> ExperimentResult {
    assert!(!utilities.is_empty());
    let episodes = utilities[0].len();
    assert!(utilities.iter().all(|run| run.len() == episodes));
    let mut mean = Vec::with_capacity(episodes);
    let mut stderr = Vec::with_capacity(episodes);
    let mut column = vec![0.0; utilities.len()];
    for e in 0..episodes {
        for (r, run) in utilities.iter().enumerate() {
            column[r] = run[e];
        }
        mean.push(compensated_mean(&column));
        stderr.push(standard_error(&column));
    }
    let mut trailing_mean = Vec::with_capacity(episodes);
    for e in 0..episodes {
        let start = (e + 1).saturating_sub(trailing_window);
        trailing_mean.push(compensated_mean(&mean[start..=e]));
    }
    ExperimentResult {
        utilities,
        mean,
        stderr,
        trailing_mean,
        trailing_window,
    }
}
