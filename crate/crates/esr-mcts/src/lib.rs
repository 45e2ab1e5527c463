//! Expectimax Monte Carlo tree search for multi-objective MDPs where the
//! optimisation target is the expected utility of the whole episode's return
//! vector rather than the utility of the expected return.
//!
//! The crate provides two planners over a shared expectimax tree:
//!
//! - [`PlannerKind::NluMcts`]: UCB selection over utility-of-return estimates.
//! - [`PlannerKind::Dmcts`]: Thompson sampling over bootstrap distributions
//!   ([`BtsDistribution`]) maintained at every chance node.
//!
//! Both planners keep a ledger of returns accrued earlier in the episode and
//! apply the utility function only to the cumulative (accrued + simulated
//! future) return vector, which is what makes nonlinear utilities work: for a
//! nonlinear `u`, `u(a + b)` is not `u(a) + u(b)`.
//!
//! Benchmark environments used to exercise the planners live in [`envs`].

pub mod bts;
pub mod config;
pub mod envs;
pub mod model;
pub mod planner;
pub mod returns;
pub mod rng;
pub mod tree;
pub mod utility;

pub use bts::{BtsDistribution, BtsError};
pub use config::{AlgorithmTag, EnvTag, RunConfig};
pub use model::{EnvironmentModel, Step};
pub use planner::{
    EpisodeResult, IterationTrace, PlanError, Planner, PlannerKind, TimestepRecord,
    DEFAULT_REWARD_MATCH_TOL,
};
pub use returns::{ReturnLedger, ReturnVector};
pub use tree::{BtsInit, ChanceId, ChanceNode, DecisionId, DecisionNode, SearchTree};
pub use utility::{min_max_scale, UtilityError, UtilityKind, UtilitySpec};
