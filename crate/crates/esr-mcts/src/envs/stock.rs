//! A small stock-trading MDP for studying risk attitudes.
//!
//! Seven market regimes cycle deterministically. Each step the agent
//! invests an integer amount (0 to 3 euros); the market then moves up by
//! the regime's profit multiplier with the regime's profit probability,
//! or down by its loss multiplier otherwise. The scalar reward is the
//! invested amount times the realised movement, so investing nothing
//! always pays zero.
//!
//! The default regimes span reliable low-gain markets and volatile
//! high-gain ones, which is what makes convex (risk-seeking) and concave
//! (risk-averse) utilities pick visibly different policies.

use rand::{Rng, RngCore};

use super::EnvError;
use crate::model::{EnvironmentModel, Step};
use crate::returns::ReturnVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StockStateLaw {
    pub profit_prob: f64,
    pub up: f64,
    pub down: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StockParams {
    pub laws: Vec<StockStateLaw>,
    pub num_actions: usize,
    pub horizon: usize,
}

impl Default for StockParams {
    fn default() -> Self {
        StockParams {
            laws: vec![
                StockStateLaw { profit_prob: 0.55, up: 4.0, down: 1.0 },
                StockStateLaw { profit_prob: 0.70, up: 2.0, down: 1.0 },
                StockStateLaw { profit_prob: 0.45, up: 5.0, down: 2.0 },
                StockStateLaw { profit_prob: 0.60, up: 3.0, down: 2.0 },
                StockStateLaw { profit_prob: 0.50, up: 4.0, down: 3.0 },
                StockStateLaw { profit_prob: 0.75, up: 2.0, down: 0.5 },
                StockStateLaw { profit_prob: 0.35, up: 5.0, down: 5.0 },
            ],
            num_actions: 4,
            horizon: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StockState {
    pub timestep: usize,
    pub market: usize,
}

#[derive(Debug, Clone)]
pub struct StockMdp {
    params: StockParams,
}

impl StockMdp {
    pub fn new(params: StockParams) -> Result<Self, EnvError> {
        if params.laws.is_empty() {
            return Err(EnvError::BadConfig("no market regimes configured".into()));
        }
        for (i, law) in params.laws.iter().enumerate() {
            if !(0.0..=1.0).contains(&law.profit_prob) {
                return Err(EnvError::BadProbability {
                    name: "profit_prob",
                    value: law.profit_prob,
                });
            }
            if !law.up.is_finite() || !law.down.is_finite() {
                return Err(EnvError::BadConfig(format!(
                    "regime {i} has non-finite multipliers"
                )));
            }
        }
        if params.num_actions == 0 {
            return Err(EnvError::BadConfig("need at least one action".into()));
        }
        if params.horizon == 0 {
            return Err(EnvError::ZeroHorizon);
        }
        Ok(StockMdp { params })
    }

    pub fn params(&self) -> &StockParams {
        &self.params
    }

    /// Expected cumulative return of the uniform-random policy, in closed
    /// form: mean invested amount times the summed drift along the
    /// deterministic regime cycle.
    pub fn uniform_policy_expectation(&self) -> f64 {
        let mean_amount = {
            let n = self.params.num_actions as f64;
            (n - 1.0) / 2.0
        };
        let mut total = 0.0;
        for t in 0..self.params.horizon {
            let law = &self.params.laws[t % self.params.laws.len()];
            let drift = law.profit_prob * law.up - (1.0 - law.profit_prob) * law.down;
            total += mean_amount * drift;
        }
        total
    }

    /// Most negative cumulative return any policy can realise: the maximal
    /// stake losing at every step of the cycle.
    pub fn worst_case_return(&self) -> f64 {
        let stake = (self.params.num_actions - 1) as f64;
        let mut total = 0.0;
        for t in 0..self.params.horizon {
            let law = &self.params.laws[t % self.params.laws.len()];
            total -= stake * law.down;
        }
        total
    }
}

impl EnvironmentModel for StockMdp {
    type State = StockState;

    fn num_objectives(&self) -> usize {
        1
    }

    fn horizon(&self) -> usize {
        self.params.horizon
    }

    fn num_actions(&self, _state: &StockState) -> usize {
        self.params.num_actions
    }

    fn initial_state(&self) -> StockState {
        StockState {
            timestep: 0,
            market: 0,
        }
    }

    fn step(&self, state: &StockState, action: usize, rng: &mut dyn RngCore) -> Step<StockState> {
        assert!(
            action < self.params.num_actions,
            "stock action {action} out of range"
        );
        let law = &self.params.laws[state.market];
        // the market moves whether or not the agent has a stake
        let movement = if rng.gen_bool(law.profit_prob) {
            law.up
        } else {
            -law.down
        };
        let reward = action as f64 * movement;
        let timestep = state.timestep + 1;
        Step {
            state: StockState {
                timestep,
                market: (state.market + 1) % self.params.laws.len(),
            },
            reward: ReturnVector::new(vec![reward]),
            terminal: timestep >= self.params.horizon,
        }
    }
}
