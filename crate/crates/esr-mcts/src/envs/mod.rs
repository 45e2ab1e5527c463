//! Benchmark environments.
//!
//! Each environment implements [`EnvironmentModel`](crate::model::EnvironmentModel)
//! as a stateless generative model. Small instances ship exact oracles
//! (dynamic programming or closed-form expectations) used by the test
//! suites to pin planner quality against ground truth.

mod bandit;
mod fishwood;
mod random_momdp;
mod redeed;
mod stock;

pub use bandit::{bandit_pull, BanditParams, Momab, SingleArmDemo, MOMAB_ARM_MEANS};
pub use fishwood::{optimal_esr, Fishwood, FishwoodParams, FishwoodState, Location};
pub use random_momdp::{RandomMomdp, RandomMomdpParams};
pub use redeed::{
    redeed_cost, redeed_emissions, redeed_penalty, Dispatch, GeneratorParams, GeneratorRole,
    Redeed, RedeedParams, RedeedState,
};
pub use stock::{StockMdp, StockParams, StockState, StockStateLaw};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("probability {name} = {value} is outside [0, 1]")]
    BadProbability { name: &'static str, value: f64 },
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("{0}")]
    BadConfig(String),
    #[error("oracle state space too large: horizon {horizon} exceeds the supported {max}")]
    OracleTooLarge { horizon: usize, max: usize },
}
