//! The generative-model contract planners run against.

use rand::RngCore;

use crate::returns::ReturnVector;

/// One simulated transition.
#[derive(Clone, Debug)]
pub struct Step<S> {
    pub state: S,
    pub reward: ReturnVector,
    pub terminal: bool,
}

/// A generative model of a finite-horizon MDP with vector rewards.
///
/// Implementations are stateless samplers: `step` draws a successor from the
/// transition law of `(state, action)` using the caller's RNG and nothing
/// else, so the same RNG stream always reproduces the same trajectory. The
/// planner uses its own stream for simulated steps and the episode executor
/// a separate one for real steps.
///
/// Every action sequence must reach a terminal state within `horizon` steps.
pub trait EnvironmentModel {
    /// Observed state. Planners store these in tree nodes and match sampled
    /// successors against existing children by equality.
    type State: Clone + PartialEq + std::fmt::Debug;

    fn num_objectives(&self) -> usize;

    fn horizon(&self) -> usize;

    fn num_actions(&self, state: &Self::State) -> usize;

    fn initial_state(&self) -> Self::State;

    fn step(&self, state: &Self::State, action: usize, rng: &mut dyn RngCore) -> Step<Self::State>;
}
