//! Fishwood: a two-location, two-objective gathering task.
//!
//! Each timestep the agent chooses where to stand. At the river it catches
//! a fish (reward `[1, 0]`) with probability `p_fish`; in the woods it finds
//! wood (reward `[0, 1]`) with probability `p_wood`; otherwise the reward is
//! zero. An episode runs for a fixed number of timesteps and the intended
//! utility is `min(fish, floor(wood / 2))`: every cooked fish needs two
//! pieces of wood.

use rand::{Rng, RngCore};

use super::EnvError;
use crate::model::{EnvironmentModel, Step};
use crate::returns::ReturnVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    River,
    Woods,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FishwoodParams {
    pub p_fish: f64,
    pub p_wood: f64,
    pub horizon: usize,
}

impl Default for FishwoodParams {
    fn default() -> Self {
        FishwoodParams {
            p_fish: 0.25,
            p_wood: 0.65,
            horizon: 13,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FishwoodState {
    pub timestep: usize,
    pub location: Location,
}

#[derive(Debug, Clone)]
pub struct Fishwood {
    params: FishwoodParams,
}

impl Fishwood {
    pub fn new(params: FishwoodParams) -> Result<Self, EnvError> {
        if !(0.0..=1.0).contains(&params.p_fish) {
            return Err(EnvError::BadProbability {
                name: "p_fish",
                value: params.p_fish,
            });
        }
        if !(0.0..=1.0).contains(&params.p_wood) {
            return Err(EnvError::BadProbability {
                name: "p_wood",
                value: params.p_wood,
            });
        }
        if params.horizon == 0 {
            return Err(EnvError::ZeroHorizon);
        }
        Ok(Fishwood { params })
    }

    pub fn params(&self) -> &FishwoodParams {
        &self.params
    }
}

impl EnvironmentModel for Fishwood {
    type State = FishwoodState;

    fn num_objectives(&self) -> usize {
        2
    }

    fn horizon(&self) -> usize {
        self.params.horizon
    }

    fn num_actions(&self, _state: &FishwoodState) -> usize {
        2
    }

    fn initial_state(&self) -> FishwoodState {
        FishwoodState {
            timestep: 0,
            location: Location::River,
        }
    }

    fn step(&self, state: &FishwoodState, action: usize, rng: &mut dyn RngCore) -> Step<FishwoodState> {
        let location = match action {
            0 => Location::River,
            1 => Location::Woods,
            _ => panic!("fishwood has two actions, got {action}"),
        };
        let reward = match location {
            Location::River => {
                if rng.gen_bool(self.params.p_fish) {
                    ReturnVector::new(vec![1.0, 0.0])
                } else {
                    ReturnVector::zeros(2)
                }
            }
            Location::Woods => {
                if rng.gen_bool(self.params.p_wood) {
                    ReturnVector::new(vec![0.0, 1.0])
                } else {
                    ReturnVector::zeros(2)
                }
            }
        };
        let timestep = state.timestep + 1;
        Step {
            state: FishwoodState {
                timestep,
                location,
            },
            reward,
            terminal: timestep >= self.params.horizon,
        }
    }
}

const ORACLE_MAX_HORIZON: usize = 120;

/// Exact maximal expected utility achievable in Fishwood, by backward
/// induction over (timestep, fish count, wood count).
///
/// The location is omitted from the induction state: the agent relocates
/// freely each step, so the value function is location-invariant.
pub fn optimal_esr(params: &FishwoodParams) -> Result<f64, EnvError> {
    Fishwood::new(*params)?;
    let h = params.horizon;
    if h > ORACLE_MAX_HORIZON {
        return Err(EnvError::OracleTooLarge {
            horizon: h,
            max: ORACLE_MAX_HORIZON,
        });
    }
    let side = h + 1;
    let utility = |fish: usize, wood: usize| (fish.min(wood / 2)) as f64;
    // value[fish * side + wood] for the timestep currently being filled
    let mut next: Vec<f64> = (0..side * side)
        .map(|i| utility(i / side, i % side))
        .collect();
    let mut current = vec![0.0; side * side];
    for _ in 0..h {
        // counts reachable at a given timestep never exceed it, but filling
        // the full plane is cheap and keeps the indexing uniform
        for fish in 0..side {
            for wood in 0..side {
                let stay = next[fish * side + wood];
                let river = if fish + 1 < side {
                    mix(params.p_fish, next[(fish + 1) * side + wood], stay)
                } else {
                    stay
                };
                let woods = if wood + 1 < side {
                    mix(params.p_wood, next[fish * side + wood + 1], stay)
                } else {
                    stay
                };
                current[fish * side + wood] = river.max(woods);
            }
        }
        std::mem::swap(&mut next, &mut current);
    }
    Ok(next[0])
}

fn mix(p: f64, success: f64, failure: f64) -> f64 {
    p * success + (1.0 - p) * failure
}
