//! Run configuration shared by the planners and the experiment harness.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::planner::PlannerKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown environment `{0}`")]
    UnknownEnv(String),
    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Which planner to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgorithmTag {
    NluMcts,
    Dmcts,
}

impl AlgorithmTag {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmTag::NluMcts => "nlu-mcts",
            AlgorithmTag::Dmcts => "dmcts",
        }
    }
}

impl FromStr for AlgorithmTag {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s.trim().replace('_', "-").as_str() {
            "nlu-mcts" => Ok(AlgorithmTag::NluMcts),
            "dmcts" => Ok(AlgorithmTag::Dmcts),
            _ => Err(ConfigError::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// Which benchmark environment to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvTag {
    Fishwood,
    Stock,
    Redeed,
    RandomMomdp,
    Momab,
    SingleArm,
}

impl EnvTag {
    pub const ALL: [EnvTag; 6] = [
        EnvTag::Fishwood,
        EnvTag::Stock,
        EnvTag::Redeed,
        EnvTag::RandomMomdp,
        EnvTag::Momab,
        EnvTag::SingleArm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EnvTag::Fishwood => "fishwood",
            EnvTag::Stock => "stock",
            EnvTag::Redeed => "redeed",
            EnvTag::RandomMomdp => "random-momdp",
            EnvTag::Momab => "momab",
            EnvTag::SingleArm => "single-arm",
        }
    }
}

impl FromStr for EnvTag {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        let normalised = s.trim().replace('_', "-");
        EnvTag::ALL
            .into_iter()
            .find(|t| t.name() == normalised)
            .ok_or_else(|| ConfigError::UnknownEnv(s.to_string()))
    }
}

/// Default UCB exploration constant.
pub const DEFAULT_EXPLORATION: f64 = std::f64::consts::SQRT_2;

/// Everything one repetition of an experiment needs, minus the utility
/// function (which the harness pairs with the environment).
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    /// Planning iterations per executed action.
    pub n_exec: usize,
    pub episodes: usize,
    pub seed: u64,
    pub algorithm: AlgorithmTag,
    /// UCB exploration constant.
    pub exploration: f64,
    /// Bootstrap replicate count.
    pub replicates: usize,
    pub alpha_init: f64,
    pub beta_init: f64,
    pub env: EnvTag,
    /// Raw environment parameter overrides, keyed by the schema of the
    /// environment named in `env`.
    pub env_params: BTreeMap<String, String>,
    /// Keep the search tree (with all its statistics) across episodes.
    pub tree_persistence: bool,
}

impl RunConfig {
    pub fn new(env: EnvTag, algorithm: AlgorithmTag) -> Self {
        RunConfig {
            n_exec: 1,
            episodes: 1,
            seed: 0,
            algorithm,
            exploration: DEFAULT_EXPLORATION,
            replicates: 100,
            alpha_init: 1.0,
            beta_init: 1.0,
            env,
            env_params: BTreeMap::new(),
            tree_persistence: true,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_exec == 0 {
            return Err(ConfigError::Invalid("n_exec must be at least 1".into()));
        }
        if self.episodes == 0 {
            return Err(ConfigError::Invalid("episodes must be at least 1".into()));
        }
        if !self.exploration.is_finite() || self.exploration < 0.0 {
            return Err(ConfigError::Invalid(format!(
                "exploration constant must be finite and non-negative, got {}",
                self.exploration
            )));
        }
        if self.replicates == 0 {
            return Err(ConfigError::Invalid(
                "replicate count must be at least 1".into(),
            ));
        }
        if !self.alpha_init.is_finite() {
            return Err(ConfigError::Invalid(format!(
                "alpha_init must be finite, got {}",
                self.alpha_init
            )));
        }
        if !(self.beta_init.is_finite() && self.beta_init > 0.0) {
            return Err(ConfigError::Invalid(format!(
                "beta_init must be finite and positive, got {}",
                self.beta_init
            )));
        }
        Ok(())
    }

    /// The planner parameterisation this configuration asks for.
    pub fn planner_kind(&self) -> PlannerKind {
        match self.algorithm {
            AlgorithmTag::NluMcts => PlannerKind::NluMcts {
                exploration: self.exploration,
            },
            AlgorithmTag::Dmcts => PlannerKind::Dmcts {
                replicates: self.replicates,
                alpha_init: self.alpha_init,
                beta_init: self.beta_init,
            },
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "env={} algo={} episodes={} n_exec={} seed={} C={} J={} alpha={} beta={} persist={}",
            self.env.name(),
            self.algorithm.name(),
            self.episodes,
            self.n_exec,
            self.seed,
            self.exploration,
            self.replicates,
            self.alpha_init,
            self.beta_init,
            if self.tree_persistence { "on" } else { "off" },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_parse_their_cli_names() {
        for tag in EnvTag::ALL {
            assert_eq!(tag.name().parse::<EnvTag>().unwrap(), tag);
        }
        assert_eq!("nlu_mcts".parse::<AlgorithmTag>().unwrap(), AlgorithmTag::NluMcts);
        assert_eq!("dmcts".parse::<AlgorithmTag>().unwrap(), AlgorithmTag::Dmcts);
        assert!("uct".parse::<AlgorithmTag>().is_err());
        assert!("gridworld".parse::<EnvTag>().is_err());
    }

    #[test]
    fn validation_rejects_degenerate_values() {
        let mut config = RunConfig::new(EnvTag::Fishwood, AlgorithmTag::Dmcts);
        config.episodes = 10;
        assert!(config.validate().is_ok());
        assert!(RunConfig { n_exec: 0, ..config.clone() }.validate().is_err());
        assert!(RunConfig { episodes: 0, ..config.clone() }.validate().is_err());
        assert!(RunConfig { replicates: 0, ..config.clone() }.validate().is_err());
        assert!(RunConfig { beta_init: 0.0, ..config.clone() }.validate().is_err());
        assert!(RunConfig { exploration: f64::NAN, ..config.clone() }.validate().is_err());
        assert!(RunConfig { exploration: -1.0, ..config }.validate().is_err());
    }

    #[test]
    fn default_exploration_is_sqrt_two() {
        assert_eq!(DEFAULT_EXPLORATION, 1.4142135623730951);
    }
}
