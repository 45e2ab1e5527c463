//! Renewable-energy economic emissions dispatch over a 24-hour day.
//!
//! Ten generators must jointly meet an hourly city demand. One generator is
//! agent-controlled (its hourly power level is the action), one is a wind
//! turbine whose output follows the weather, one is a slack generator that
//! absorbs whatever residual demand the others leave, and the rest run on
//! fixed demand shares. From a configurable hour onward a storm makes the
//! wind output stochastic: it is scaled by one of three multipliers drawn
//! independently each hour.
//!
//! Each hour yields three objectives, accumulated as negatives so that
//! maximising a product utility drives all three magnitudes down:
//! total generation cost, total emissions, and a penalty for power-limit
//! and ramp violations weighted by how late in the day they happen.
//!
//! The shipped default coefficients are synthetic placeholders with
//! realistic shapes, not measurements of any concrete generator fleet.
//! Quality claims on this environment should therefore be comparative
//! (planner vs planner), never absolute.

use rand::{Rng, RngCore};

use super::EnvError;
use crate::model::{EnvironmentModel, Step};
use crate::returns::ReturnVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorRole {
    Slack,
    Fixed,
    Agent,
    Wind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorParams {
    pub role: GeneratorRole,
    /// Fraction of hourly demand produced by Fixed and Wind generators.
    pub share: f64,
    pub cost_a: f64,
    pub cost_b: f64,
    pub cost_c: f64,
    pub cost_d: f64,
    pub cost_e: f64,
    pub em_alpha: f64,
    pub em_beta: f64,
    pub em_gamma: f64,
    pub em_eta: f64,
    pub em_delta: f64,
    pub p_min: f64,
    pub p_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RedeedParams {
    /// Hourly demand in MW; its length is the episode horizon.
    pub demand: Vec<f64>,
    pub generators: Vec<GeneratorParams>,
    /// Power levels the agent generator can be set to.
    pub agent_levels: Vec<f64>,
    /// Index into agent_levels the day starts from.
    pub agent_initial_level: usize,
    /// Largest hour-to-hour agent level change that avoids a penalty.
    pub agent_ramp: f64,
    pub penalty_scale: f64,
    pub emission_scale: f64,
    /// First hour (0-based) with stormy weather.
    pub storm_start: usize,
    pub storm_multipliers: [f64; 3],
    pub storm_probs: [f64; 3],
}

fn fixed(share: f64, a: f64, b: f64, c: f64, d: f64, e: f64, alpha: f64, beta: f64, gamma: f64, eta: f64, delta: f64, p_max: f64) -> GeneratorParams {
    GeneratorParams {
        role: GeneratorRole::Fixed,
        share,
        cost_a: a,
        cost_b: b,
        cost_c: c,
        cost_d: d,
        cost_e: e,
        em_alpha: alpha,
        em_beta: beta,
        em_gamma: gamma,
        em_eta: eta,
        em_delta: delta,
        p_min: 0.0,
        p_max,
    }
}

impl Default for RedeedParams {
    fn default() -> Self {
        let generators = vec![
            GeneratorParams {
                role: GeneratorRole::Slack,
                share: 0.0,
                cost_a: 550.0,
                cost_b: 3.5,
                cost_c: 0.0030,
                cost_d: 120.0,
                cost_e: 0.045,
                em_alpha: 28.0,
                em_beta: -0.30,
                em_gamma: 0.0035,
                em_eta: 0.012,
                em_delta: 0.012,
                p_min: 0.0,
                p_max: 600.0,
            },
            fixed(0.14, 310.0, 2.4, 0.0016, 90.0, 0.050, 18.0, -0.22, 0.0022, 0.008, 0.012, 400.0),
            GeneratorParams {
                role: GeneratorRole::Agent,
                share: 0.0,
                cost_a: 240.0,
                cost_b: 1.8,
                cost_c: 0.0012,
                cost_d: 60.0,
                cost_e: 0.060,
                em_alpha: 12.0,
                em_beta: -0.18,
                em_gamma: 0.0010,
                em_eta: 0.008,
                em_delta: 0.010,
                p_min: 50.0,
                p_max: 250.0,
            },
            GeneratorParams {
                role: GeneratorRole::Wind,
                share: 0.10,
                cost_a: 0.0,
                cost_b: 0.0,
                cost_c: 0.0,
                cost_d: 0.0,
                cost_e: 0.0,
                em_alpha: 0.0,
                em_beta: 0.0,
                em_gamma: 0.0,
                em_eta: 0.0,
                em_delta: 0.0,
                p_min: 0.0,
                p_max: 400.0,
            },
            fixed(0.12, 280.0, 2.6, 0.0018, 85.0, 0.052, 16.0, -0.20, 0.0020, 0.007, 0.012, 350.0),
            fixed(0.11, 260.0, 2.7, 0.0019, 80.0, 0.054, 15.0, -0.20, 0.0021, 0.007, 0.012, 320.0),
            fixed(0.09, 230.0, 2.9, 0.0021, 75.0, 0.056, 14.0, -0.19, 0.0023, 0.006, 0.012, 280.0),
            fixed(0.07, 200.0, 3.0, 0.0023, 70.0, 0.058, 13.0, -0.18, 0.0025, 0.006, 0.013, 220.0),
            fixed(0.05, 170.0, 3.2, 0.0026, 65.0, 0.060, 12.0, -0.17, 0.0027, 0.005, 0.014, 180.0),
            // deliberately under-sized: exceeds its limit at peak demand,
            // giving every episode a nonzero penalty baseline
            fixed(0.07, 200.0, 3.1, 0.0024, 70.0, 0.058, 13.0, -0.18, 0.0025, 0.006, 0.013, 110.0),
        ];
        RedeedParams {
            demand: vec![
                1100.0, 1050.0, 1000.0, 980.0, 1000.0, 1100.0, 1300.0, 1500.0, 1700.0, 1800.0,
                1850.0, 1900.0, 1850.0, 1800.0, 1750.0, 1700.0, 1800.0, 1950.0, 2050.0, 2000.0,
                1850.0, 1650.0, 1400.0, 1200.0,
            ],
            generators,
            agent_levels: vec![50.0, 100.0, 150.0, 200.0, 250.0],
            agent_initial_level: 2,
            agent_ramp: 60.0,
            penalty_scale: 10.0,
            emission_scale: 10.0,
            storm_start: 15,
            storm_multipliers: [0.75, 1.0, 1.25],
            storm_probs: [0.15, 0.7, 0.15],
        }
    }
}

/// Local generation cost at power `p`.
pub fn redeed_cost(g: &GeneratorParams, p: f64) -> f64 {
    g.cost_a
        + g.cost_b * p
        + g.cost_c * p * p
        + (g.cost_d * (g.cost_e * (g.p_min - p)).sin()).abs()
}

/// Local emissions at power `p`; wind generation emits nothing.
pub fn redeed_emissions(g: &GeneratorParams, p: f64, scale: f64) -> f64 {
    if g.role == GeneratorRole::Wind {
        return 0.0;
    }
    scale * (g.em_alpha + g.em_beta * p + g.em_gamma * p * p + g.em_eta * (g.em_delta * p).exp())
}

/// Penalty for a set of violations, each an (hour, magnitude) pair.
/// Later hours weigh heavier: a violation at hour `h` costs
/// `scale * (h + 1) * magnitude`.
pub fn redeed_penalty(violations: &[(usize, f64)], scale: f64) -> f64 {
    violations
        .iter()
        .map(|&(hour, magnitude)| scale * (hour + 1) as f64 * magnitude)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RedeedState {
    pub hour: usize,
    /// Index into agent_levels of the level running in the previous hour.
    pub prev_level: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dispatch {
    pub powers: Vec<f64>,
    pub cost: f64,
    pub emissions: f64,
    pub penalty: f64,
}

#[derive(Debug, Clone)]
pub struct Redeed {
    params: RedeedParams,
}

impl Redeed {
    pub fn new(params: RedeedParams) -> Result<Self, EnvError> {
        if params.demand.is_empty() {
            return Err(EnvError::BadConfig("empty demand profile".into()));
        }
        if params.demand.iter().any(|d| !d.is_finite()) {
            return Err(EnvError::BadConfig("non-finite demand".into()));
        }
        let roles = |r: GeneratorRole| {
            params
                .generators
                .iter()
                .filter(|g| g.role == r)
                .count()
        };
        if roles(GeneratorRole::Slack) != 1 {
            return Err(EnvError::BadConfig(
                "exactly one slack generator required".into(),
            ));
        }
        if roles(GeneratorRole::Agent) != 1 {
            return Err(EnvError::BadConfig(
                "exactly one agent generator required".into(),
            ));
        }
        if params.agent_levels.is_empty() {
            return Err(EnvError::BadConfig("no agent power levels".into()));
        }
        if params.agent_initial_level >= params.agent_levels.len() {
            return Err(EnvError::BadConfig(
                "initial level index out of range".into(),
            ));
        }
        if params.agent_ramp < 0.0 {
            return Err(EnvError::BadConfig("negative ramp limit".into()));
        }
        for (i, p) in params.storm_probs.iter().enumerate() {
            if !(0.0..=1.0).contains(p) {
                return Err(EnvError::BadProbability {
                    name: "storm_probs",
                    value: params.storm_probs[i],
                });
            }
        }
        let total: f64 = params.storm_probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(EnvError::BadConfig(format!(
                "storm probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Redeed { params })
    }

    pub fn params(&self) -> &RedeedParams {
        &self.params
    }

    /// Resolve one hour of generation: every generator's power, the global
    /// cost and emissions, and the penalty for limit and ramp violations.
    pub fn dispatch(
        &self,
        hour: usize,
        prev_level: usize,
        level: usize,
        wind_multiplier: f64,
    ) -> Dispatch {
        let p = &self.params;
        let demand = p.demand[hour];
        let agent_power = p.agent_levels[level];
        let mut powers = vec![0.0; p.generators.len()];
        let mut committed = 0.0;
        for (i, g) in p.generators.iter().enumerate() {
            let power = match g.role {
                GeneratorRole::Fixed => g.share * demand,
                GeneratorRole::Wind => g.share * demand * wind_multiplier,
                GeneratorRole::Agent => agent_power,
                GeneratorRole::Slack => continue,
            };
            powers[i] = power;
            committed += power;
        }
        let mut violations: Vec<(usize, f64)> = Vec::new();
        for (i, g) in p.generators.iter().enumerate() {
            if g.role == GeneratorRole::Slack {
                powers[i] = demand - committed;
            }
            let power = powers[i];
            let excess = (g.p_min - power).max(power - g.p_max);
            if excess > 1e-9 {
                violations.push((hour, excess));
            }
        }
        let ramp_move = (agent_power - p.agent_levels[prev_level]).abs();
        if ramp_move > p.agent_ramp + 1e-9 {
            violations.push((hour, ramp_move - p.agent_ramp));
        }
        let cost = p
            .generators
            .iter()
            .zip(&powers)
            .map(|(g, &power)| redeed_cost(g, power))
            .sum();
        let emissions = p
            .generators
            .iter()
            .zip(&powers)
            .map(|(g, &power)| redeed_emissions(g, power, p.emission_scale))
            .sum();
        Dispatch {
            powers,
            cost,
            emissions,
            penalty: redeed_penalty(&violations, p.penalty_scale),
        }
    }

    fn sample_wind_multiplier(&self, hour: usize, rng: &mut dyn RngCore) -> f64 {
        if hour < self.params.storm_start {
            return 1.0;
        }
        let draw: f64 = rng.gen();
        let mut cumulative = 0.0;
        for (prob, mult) in self
            .params
            .storm_probs
            .iter()
            .zip(&self.params.storm_multipliers)
        {
            cumulative += prob;
            if draw < cumulative {
                return *mult;
            }
        }
        self.params.storm_multipliers[2]
    }
}

impl EnvironmentModel for Redeed {
    type State = RedeedState;

    fn num_objectives(&self) -> usize {
        3
    }

    fn horizon(&self) -> usize {
        self.params.demand.len()
    }

    fn num_actions(&self, _state: &RedeedState) -> usize {
        self.params.agent_levels.len()
    }

    fn initial_state(&self) -> RedeedState {
        RedeedState {
            hour: 0,
            prev_level: self.params.agent_initial_level,
        }
    }

    fn step(&self, state: &RedeedState, action: usize, rng: &mut dyn RngCore) -> Step<RedeedState> {
        assert!(
            action < self.params.agent_levels.len(),
            "agent level {action} out of range"
        );
        let multiplier = self.sample_wind_multiplier(state.hour, rng);
        let dispatch = self.dispatch(state.hour, state.prev_level, action, multiplier);
        let hour = state.hour + 1;
        Step {
            state: RedeedState {
                hour,
                prev_level: action,
            },
            reward: ReturnVector::new(vec![
                -dispatch.cost,
                -dispatch.emissions,
                -dispatch.penalty,
            ]),
            terminal: hour >= self.params.demand.len(),
        }
    }
}
