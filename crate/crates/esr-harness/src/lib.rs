//! Experiment harness for the esr-mcts planners: environment construction
//! from config files, multi-run experiments with aggregate curves, CSV
//! output and posterior ablations.

pub mod ablations;
pub mod csvio;
pub mod envcfg;
pub mod error;
pub mod experiment;

pub use envcfg::{build_env, BuiltEnv};
pub use error::HarnessError;
pub use experiment::{
    run_experiment, run_planner_experiment, ExperimentConfig, ExperimentResult, DEFAULT_RUNS,
    DEFAULT_TRAILING_WINDOW,
};
