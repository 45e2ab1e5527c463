//! Randomly generated finite MOMDPs with a fixed construction seed.
//!
//! Transition tables are built once up front: every (state, action) pair
//! gets a fixed set of distinct successor states with normalised
//! uniform-random probabilities, plus a constant reward vector per
//! successor drawn uniformly from the unit cube. The same seed always
//! builds bitwise-identical tables, so experiments across planner
//! configurations share one environment instance structure.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::EnvError;
use crate::model::{EnvironmentModel, Step};
use crate::returns::ReturnVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomMomdpParams {
    /// Seed for the table construction, independent of episode randomness.
    pub structure_seed: u64,
    pub num_states: usize,
    pub num_actions: usize,
    pub num_objectives: usize,
    /// Distinct successor states per (state, action).
    pub successors: usize,
    pub horizon: usize,
}

impl Default for RandomMomdpParams {
    fn default() -> Self {
        RandomMomdpParams {
            structure_seed: 1,
            num_states: 20,
            num_actions: 2,
            num_objectives: 2,
            successors: 8,
            horizon: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomMomdpState {
    pub timestep: usize,
    pub state: usize,
}

#[derive(Debug, Clone)]
struct Outcome {
    successor: usize,
    probability: f64,
    reward: ReturnVector,
}

#[derive(Debug, Clone)]
pub struct RandomMomdp {
    params: RandomMomdpParams,
    /// outcomes[state * num_actions + action]
    outcomes: Vec<Vec<Outcome>>,
}

impl RandomMomdp {
    pub fn new(params: RandomMomdpParams) -> Result<Self, EnvError> {
        if params.num_states == 0 || params.num_actions == 0 || params.num_objectives == 0 {
            return Err(EnvError::BadConfig(
                "states, actions and objectives must all be positive".into(),
            ));
        }
        if params.successors == 0 || params.successors > params.num_states {
            return Err(EnvError::BadConfig(format!(
                "cannot pick {} distinct successors from {} states",
                params.successors, params.num_states
            )));
        }
        if params.horizon == 0 {
            return Err(EnvError::ZeroHorizon);
        }
        let mut rng = ChaCha12Rng::seed_from_u64(params.structure_seed);
        let mut outcomes = Vec::with_capacity(params.num_states * params.num_actions);
        // per (state, action), in row order: successors are drawn first,
        // then their probabilities, then their reward vectors
        for _ in 0..params.num_states * params.num_actions {
            let successors = sample_distinct(params.num_states, params.successors, &mut rng);
            let mut weights: Vec<f64> = (0..params.successors)
                .map(|_| rng.gen_range(0.0..1.0))
                .collect();
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            let row = successors
                .into_iter()
                .zip(weights)
                .map(|(successor, probability)| Outcome {
                    successor,
                    probability,
                    reward: ReturnVector::new(
                        (0..params.num_objectives)
                            .map(|_| rng.gen_range(0.0..1.0))
                            .collect(),
                    ),
                })
                .collect();
            outcomes.push(row);
        }
        Ok(RandomMomdp { params, outcomes })
    }

    pub fn params(&self) -> &RandomMomdpParams {
        &self.params
    }

    pub fn transition_row(&self, state: usize, action: usize) -> Vec<(usize, f64)> {
        self.outcomes[state * self.params.num_actions + action]
            .iter()
            .map(|o| (o.successor, o.probability))
            .collect()
    }

    fn sample_outcome(&self, state: usize, action: usize, rng: &mut dyn RngCore) -> &Outcome {
        let row = &self.outcomes[state * self.params.num_actions + action];
        let draw: f64 = rng.gen();
        let mut cumulative = 0.0;
        for outcome in row {
            cumulative += outcome.probability;
            if draw < cumulative {
                return outcome;
            }
        }
        row.last().expect("rows are never empty")
    }
}

fn sample_distinct(population: usize, k: usize, rng: &mut ChaCha12Rng) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..population).collect();
    for i in 0..k {
        let j = rng.gen_range(i..population);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

impl EnvironmentModel for RandomMomdp {
    type State = RandomMomdpState;

    fn num_objectives(&self) -> usize {
        self.params.num_objectives
    }

    fn horizon(&self) -> usize {
        self.params.horizon
    }

    fn num_actions(&self, _state: &RandomMomdpState) -> usize {
        self.params.num_actions
    }

    fn initial_state(&self) -> RandomMomdpState {
        RandomMomdpState {
            timestep: 0,
            state: 0,
        }
    }

    fn step(
        &self,
        state: &RandomMomdpState,
        action: usize,
        rng: &mut dyn RngCore,
    ) -> Step<RandomMomdpState> {
        assert!(action < self.params.num_actions, "action {action} out of range");
        let outcome = self.sample_outcome(state.state, action, rng);
        let timestep = state.timestep + 1;
        Step {
            state: RandomMomdpState {
                timestep,
                state: outcome.successor,
            },
            reward: outcome.reward.clone(),
            terminal: timestep >= self.params.horizon,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_builds_identical_tables() {
        let a = RandomMomdp::new(RandomMomdpParams::default()).unwrap();
        let b = RandomMomdp::new(RandomMomdpParams::default()).unwrap();
        for s in 0..20 {
            for act in 0..2 {
                assert_eq!(a.transition_row(s, act), b.transition_row(s, act));
                let row_a = &a.outcomes[s * 2 + act];
                let row_b = &b.outcomes[s * 2 + act];
                for (oa, ob) in row_a.iter().zip(row_b) {
                    assert!(oa.reward.approx_eq(&ob.reward, 0.0));
                }
            }
        }
        let c = RandomMomdp::new(RandomMomdpParams {
            structure_seed: 2,
            ..RandomMomdpParams::default()
        })
        .unwrap();
        assert_ne!(a.transition_row(0, 0), c.transition_row(0, 0));
    }

    #[test]
    fn every_row_is_a_distribution_over_distinct_successors() {
        let env = RandomMomdp::new(RandomMomdpParams::default()).unwrap();
        for s in 0..20 {
            for a in 0..2 {
                let row = env.transition_row(s, a);
                assert_eq!(row.len(), 8);
                let total: f64 = row.iter().map(|(_, p)| p).sum();
                assert!((total - 1.0).abs() < 1e-12, "row sums to {total}");
                let mut seen: Vec<usize> = row.iter().map(|(s, _)| *s).collect();
                seen.sort_unstable();
                seen.dedup();
                assert_eq!(seen.len(), 8, "successors must be distinct");
                for (_, p) in &row {
                    assert!(*p > 0.0);
                }
            }
        }
    }

    #[test]
    fn rewards_live_in_the_unit_cube() {
        let env = RandomMomdp::new(RandomMomdpParams::default()).unwrap();
        for row in &env.outcomes {
            for outcome in row {
                for k in 0..2 {
                    assert!((0.0..=1.0).contains(&outcome.reward[k]));
                }
            }
        }
    }

    #[test]
    fn rejects_impossible_successor_counts() {
        let params = RandomMomdpParams {
            successors: 25,
            ..RandomMomdpParams::default()
        };
        assert!(RandomMomdp::new(params).is_err());
    }

    #[test]
    fn sampled_successor_frequencies_match_the_table() {
        let env = RandomMomdp::new(RandomMomdpParams::default()).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(123);
        let state = RandomMomdpState {
            timestep: 0,
            state: 7,
        };
        let samples = 100_000;
        let mut counts = vec![0u32; 20];
        for _ in 0..samples {
            let step = env.step(&state, 1, &mut rng);
            counts[step.state.state] += 1;
        }
        for (successor, probability) in env.transition_row(7, 1) {
            let freq = counts[successor] as f64 / samples as f64;
            assert!(
                (freq - probability).abs() < 0.01,
                "successor {successor}: frequency {freq} vs probability {probability}"
            );
        }
    }

    #[test]
    fn episodes_terminate_at_the_horizon() {
        let env = RandomMomdp::new(RandomMomdpParams::default()).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let mut state = env.initial_state();
        for t in 1..=6 {
            let step = env.step(&state, t % 2, &mut rng);
            assert_eq!(step.terminal, t == 6);
            state = step.state;
        }
    }
}
