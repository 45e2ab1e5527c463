//! Environment construction from tags and optional TOML parameter files.
//!
//! A config file only needs the keys it wants to change; anything omitted
//! keeps the environment's documented default. Table-valued keys (stock
//! regimes, dispatch generators, bandit arms, demand profiles) replace the
//! whole table when present, since partial rows have no sensible meaning.

use std::fs;
use std::path::Path;

use esr_mcts::config::EnvTag;
use esr_mcts::envs::{
    BanditParams, Fishwood, FishwoodParams, GeneratorParams, GeneratorRole, Momab, RandomMomdp,
    RandomMomdpParams, Redeed, RedeedParams, SingleArmDemo, StockMdp, StockParams, StockStateLaw,
};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::HarnessError;

#[derive(Debug, Clone)]
pub enum BuiltEnv {
    Fishwood(Fishwood),
    Stock(StockMdp),
    Redeed(Redeed),
    RandomMomdp(RandomMomdp),
    Momab(Momab),
    SingleArm(SingleArmDemo),
}

impl BuiltEnv {
    pub fn num_objectives(&self) -> usize {
        use esr_mcts::EnvironmentModel;
        match self {
            BuiltEnv::Fishwood(e) => e.num_objectives(),
            BuiltEnv::Stock(e) => e.num_objectives(),
            BuiltEnv::Redeed(e) => e.num_objectives(),
            BuiltEnv::RandomMomdp(e) => e.num_objectives(),
            BuiltEnv::Momab(e) => e.num_objectives(),
            BuiltEnv::SingleArm(e) => e.num_objectives(),
        }
    }
}

pub fn build_env(tag: EnvTag, config: Option<&Path>) -> Result<BuiltEnv, HarnessError> {
    let env = match tag {
        EnvTag::Fishwood => BuiltEnv::Fishwood(
            Fishwood::new(fishwood_params(config)?).map_err(config_err)?,
        ),
        EnvTag::Stock => {
            BuiltEnv::Stock(StockMdp::new(stock_params(config)?).map_err(config_err)?)
        }
        EnvTag::Redeed => {
            BuiltEnv::Redeed(Redeed::new(redeed_params(config)?).map_err(config_err)?)
        }
        EnvTag::RandomMomdp => BuiltEnv::RandomMomdp(
            RandomMomdp::new(random_momdp_params(config)?).map_err(config_err)?,
        ),
        EnvTag::Momab => {
            BuiltEnv::Momab(Momab::new(momab_params(config)?).map_err(config_err)?)
        }
        EnvTag::SingleArm => {
            if config.is_some() {
                return Err(HarnessError::Config(
                    "the single-arm demo takes no configuration file".into(),
                ));
            }
            BuiltEnv::SingleArm(SingleArmDemo)
        }
    };
    Ok(env)
}

fn config_err(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(e.to_string())
}

fn read_file<T: DeserializeOwned>(path: &Path) -> Result<T, HarnessError> {
    let text = fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FishwoodFile {
    p_fish: Option<f64>,
    p_wood: Option<f64>,
    horizon: Option<usize>,
}

pub fn fishwood_params(config: Option<&Path>) -> Result<FishwoodParams, HarnessError> {
    let d = FishwoodParams::default();
    let Some(path) = config else { return Ok(d) };
    let f: FishwoodFile = read_file(path)?;
    Ok(FishwoodParams {
        p_fish: f.p_fish.unwrap_or(d.p_fish),
        p_wood: f.p_wood.unwrap_or(d.p_wood),
        horizon: f.horizon.unwrap_or(d.horizon),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegimeRow {
    profit_prob: f64,
    up: f64,
    down: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StockFile {
    horizon: Option<usize>,
    num_actions: Option<usize>,
    regimes: Option<Vec<RegimeRow>>,
}

pub fn stock_params(config: Option<&Path>) -> Result<StockParams, HarnessError> {
    let d = StockParams::default();
    let Some(path) = config else { return Ok(d) };
    let f: StockFile = read_file(path)?;
    Ok(StockParams {
        laws: match f.regimes {
            Some(rows) => rows
                .into_iter()
                .map(|r| StockStateLaw {
                    profit_prob: r.profit_prob,
                    up: r.up,
                    down: r.down,
                })
                .collect(),
            None => d.laws,
        },
        num_actions: f.num_actions.unwrap_or(d.num_actions),
        horizon: f.horizon.unwrap_or(d.horizon),
    })
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RoleName {
    Slack,
    Fixed,
    Agent,
    Wind,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorRow {
    role: RoleName,
    share: f64,
    cost_a: f64,
    cost_b: f64,
    cost_c: f64,
    cost_d: f64,
    cost_e: f64,
    em_alpha: f64,
    em_beta: f64,
    em_gamma: f64,
    em_eta: f64,
    em_delta: f64,
    p_min: f64,
    p_max: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RedeedFile {
    demand: Option<Vec<f64>>,
    generators: Option<Vec<GeneratorRow>>,
    agent_levels: Option<Vec<f64>>,
    agent_initial_level: Option<usize>,
    agent_ramp: Option<f64>,
    penalty_scale: Option<f64>,
    emission_scale: Option<f64>,
    storm_start: Option<usize>,
    storm_multipliers: Option<[f64; 3]>,
    storm_probs: Option<[f64; 3]>,
}

pub fn redeed_params(config: Option<&Path>) -> Result<RedeedParams, HarnessError> {
    let d = RedeedParams::default();
    let Some(path) = config else { return Ok(d) };
    let f: RedeedFile = read_file(path)?;
    Ok(RedeedParams {
        demand: f.demand.unwrap_or(d.demand),
        generators: match f.generators {
            Some(rows) => rows
                .into_iter()
                .map(|r| GeneratorParams {
                    role: match r.role {
                        RoleName::Slack => GeneratorRole::Slack,
                        RoleName::Fixed => GeneratorRole::Fixed,
                        RoleName::Agent => GeneratorRole::Agent,
                        RoleName::Wind => GeneratorRole::Wind,
                    },
                    share: r.share,
                    cost_a: r.cost_a,
                    cost_b: r.cost_b,
                    cost_c: r.cost_c,
                    cost_d: r.cost_d,
                    cost_e: r.cost_e,
                    em_alpha: r.em_alpha,
                    em_beta: r.em_beta,
                    em_gamma: r.em_gamma,
                    em_eta: r.em_eta,
                    em_delta: r.em_delta,
                    p_min: r.p_min,
                    p_max: r.p_max,
                })
                .collect(),
            None => d.generators,
        },
        agent_levels: f.agent_levels.unwrap_or(d.agent_levels),
        agent_initial_level: f.agent_initial_level.unwrap_or(d.agent_initial_level),
        agent_ramp: f.agent_ramp.unwrap_or(d.agent_ramp),
        penalty_scale: f.penalty_scale.unwrap_or(d.penalty_scale),
        emission_scale: f.emission_scale.unwrap_or(d.emission_scale),
        storm_start: f.storm_start.unwrap_or(d.storm_start),
        storm_multipliers: f.storm_multipliers.unwrap_or(d.storm_multipliers),
        storm_probs: f.storm_probs.unwrap_or(d.storm_probs),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomMomdpFile {
    structure_seed: Option<u64>,
    num_states: Option<usize>,
    num_actions: Option<usize>,
    num_objectives: Option<usize>,
    successors: Option<usize>,
    horizon: Option<usize>,
}

pub fn random_momdp_params(config: Option<&Path>) -> Result<RandomMomdpParams, HarnessError> {
    let d = RandomMomdpParams::default();
    let Some(path) = config else { return Ok(d) };
    let f: RandomMomdpFile = read_file(path)?;
    Ok(RandomMomdpParams {
        structure_seed: f.structure_seed.unwrap_or(d.structure_seed),
        num_states: f.num_states.unwrap_or(d.num_states),
        num_actions: f.num_actions.unwrap_or(d.num_actions),
        num_objectives: f.num_objectives.unwrap_or(d.num_objectives),
        successors: f.successors.unwrap_or(d.successors),
        horizon: f.horizon.unwrap_or(d.horizon),
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MomabFile {
    arms: Option<Vec<Vec<f64>>>,
    variance: Option<f64>,
}

pub fn momab_params(config: Option<&Path>) -> Result<BanditParams, HarnessError> {
    let d = BanditParams::default();
    let Some(path) = config else { return Ok(d) };
    let f: MomabFile = read_file(path)?;
    Ok(BanditParams {
        arms: f.arms.unwrap_or(d.arms),
        variance: f.variance.unwrap_or(d.variance),
    })
}
