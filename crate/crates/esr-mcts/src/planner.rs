//! The two planners: expectimax MCTS with UCB selection over
//! utility-of-return estimates, and its Thompson-sampling variant that keeps
//! a bootstrap distribution at every chance node.
//!
//! Both share one iteration shape. Selection walks the tree from the current
//! root: a terminal node ends the walk, a node with unexpanded actions grows
//! one uniformly chosen chance child, and a fully expanded node picks a
//! chance child (UCB or Thompson) and samples an outcome through it with the
//! generative model. A uniform-random rollout then plays the leaf out to the
//! end of the episode. The utility of accrued-plus-simulated returns, never
//! of any partial sum, is finally backpropagated leaf-to-root, and for the
//! Thompson variant also folded into each chance node's bootstrap
//! distribution.
//!
//! At execution time both planners commit to the root action with the
//! highest mean utility over all iterations through it.

use rand::Rng;
use thiserror::Error;

use crate::bts::BtsError;
use crate::model::{EnvironmentModel, Step};
use crate::returns::{ReturnLedger, ReturnVector};
use crate::tree::{BtsInit, ChanceId, DecisionId, SearchTree};
use crate::utility::{UtilityError, UtilitySpec};

/// Sampled rewards within this absolute tolerance of an existing outcome
/// child are treated as the same outcome. Integer-valued reward schemes are
/// matched exactly by any tolerance below 1.
pub const DEFAULT_REWARD_MATCH_TOL: f64 = 1e-9;

/// Planner parameterisation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PlannerKind {
    /// UCB selection with the given exploration constant.
    NluMcts { exploration: f64 },
    /// Thompson sampling over per-chance-node bootstrap distributions.
    Dmcts {
        replicates: usize,
        alpha_init: f64,
        beta_init: f64,
    },
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    Utility(#[from] UtilityError),
    #[error(transparent)]
    Bts(#[from] BtsError),
    #[error("cannot plan from a terminal state")]
    TerminalRoot,
    #[error("no root action has been visited; plan at least one iteration first")]
    NoVisitedRootAction,
}

/// What one planning iteration did; enough to audit selection, utility
/// evaluation, and backpropagation from the outside.
#[derive(Clone, Debug)]
pub struct IterationTrace {
    /// Decision nodes on the walk, root first, leaf last.
    pub path_decisions: Vec<DecisionId>,
    /// Chance nodes on the walk, outermost first.
    pub path_chances: Vec<ChanceId>,
    pub leaf: DecisionId,
    /// Accrued plus simulated returns for the whole episode.
    pub cumulative: ReturnVector,
    /// Utility of `cumulative`; the one value credited to every node on the
    /// walk.
    pub utility: f64,
}

/// One step of an executed episode.
#[derive(Clone, Debug, PartialEq)]
pub struct TimestepRecord<S> {
    pub state: S,
    pub action: usize,
    pub reward: ReturnVector,
}

/// A finished episode.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeResult<S> {
    pub trajectory: Vec<TimestepRecord<S>>,
    /// Undiscounted sum of all rewards received.
    pub cumulative: ReturnVector,
    /// Utility of `cumulative`.
    pub utility: f64,
    /// Planning iterations spent before each executed action.
    pub iterations_per_step: Vec<usize>,
}

pub struct Planner<M: EnvironmentModel> {
    kind: PlannerKind,
    utility: UtilitySpec,
    tree: SearchTree<M::State>,
    persist_tree: bool,
    objectives: usize,
}

impl<M: EnvironmentModel> Planner<M> {
    /// Builds a planner rooted at the model's initial state.
    ///
    /// `tree_persistence` keeps the tree (and every statistic in it) across
    /// episodes; with it off each episode starts from a blank root.
    pub fn new(
        model: &M,
        kind: PlannerKind,
        utility: UtilitySpec,
        tree_persistence: bool,
        reward_match_tol: f64,
    ) -> Result<Self, PlanError> {
        let objectives = model.num_objectives();
        if let Some(expected) = utility.arity() {
            if expected != objectives {
                return Err(UtilityError::ArityMismatch {
                    kind: utility.kind().name(),
                    expected,
                    got: objectives,
                }
                .into());
            }
        }
        let bts_init = match kind {
            PlannerKind::NluMcts { exploration } => {
                assert!(
                    exploration.is_finite() && exploration >= 0.0,
                    "exploration constant must be finite and non-negative, got {exploration}"
                );
                None
            }
            PlannerKind::Dmcts {
                replicates,
                alpha_init,
                beta_init,
            } => {
                assert!(alpha_init.is_finite(), "alpha_init must be finite");
                if replicates == 0 {
                    return Err(BtsError::NoReplicates.into());
                }
                if !(beta_init > 0.0 && beta_init.is_finite()) {
                    return Err(BtsError::NonPositiveBeta(beta_init).into());
                }
                Some(BtsInit {
                    replicates,
                    alpha: alpha_init,
                    beta: beta_init,
                })
            }
        };
        let initial = model.initial_state();
        let num_actions = model.num_actions(&initial);
        Ok(Planner {
            kind,
            utility,
            tree: SearchTree::new(initial, num_actions, reward_match_tol, bts_init),
            persist_tree: tree_persistence,
            objectives,
        })
    }

    pub fn kind(&self) -> PlannerKind {
        self.kind
    }

    pub fn utility(&self) -> &UtilitySpec {
        &self.utility
    }

    pub fn tree(&self) -> &SearchTree<M::State> {
        &self.tree
    }

    /// Runs `iterations` planning iterations from the current root against
    /// `accrued` returns already banked this episode, then returns the root
    /// action with the highest mean utility (ties to the lowest index).
    pub fn plan<R: Rng>(
        &mut self,
        model: &M,
        accrued: &ReturnVector,
        iterations: usize,
        rng: &mut R,
    ) -> Result<usize, PlanError> {
        for _ in 0..iterations {
            self.plan_once(model, accrued, rng)?;
        }
        self.tree
            .best_action_by_mean(self.tree.root_id())
            .ok_or(PlanError::NoVisitedRootAction)
    }

    /// One planning iteration: selection, rollout, backpropagation.
    pub fn plan_once<R: Rng>(
        &mut self,
        model: &M,
        accrued: &ReturnVector,
        rng: &mut R,
    ) -> Result<IterationTrace, PlanError> {
        let root = self.tree.root_id();
        if self.tree.decision(root).terminal {
            return Err(PlanError::TerminalRoot);
        }
        debug_assert_eq!(accrued.len(), self.objectives);

        let mut ledger = ReturnLedger::from_accrued(accrued.clone());
        let mut path_decisions = vec![root];
        let mut path_chances = Vec::new();

        // Selection: stop on a terminal node, grow one chance child where
        // actions remain unexpanded, otherwise descend through the selected
        // chance node by sampling an outcome from the model.
        let mut node = root;
        let leaf = loop {
            let decision = self.tree.decision(node);
            if decision.terminal {
                break node;
            }
            if !decision.is_fully_expanded() {
                let unexpanded: Vec<usize> = decision.unexpanded_actions().collect();
                let action = unexpanded[rng.gen_range(0..unexpanded.len())];
                let cid = self.tree.expand_action(node, action);
                path_chances.push(cid);
                let leaf = self.sample_outcome(model, cid, &mut ledger, rng);
                path_decisions.push(leaf);
                break leaf;
            }
            let cid = match self.kind {
                PlannerKind::NluMcts { exploration } => {
                    self.tree.best_child_ucb(node, exploration).1
                }
                PlannerKind::Dmcts { .. } => self.thompson_select(node, rng),
            };
            path_chances.push(cid);
            node = self.sample_outcome(model, cid, &mut ledger, rng);
            path_decisions.push(node);
        };

        // Rollout: play a uniform-random policy to the end of the episode.
        if !self.tree.decision(leaf).terminal {
            let mut state = self.tree.decision(leaf).state.clone();
            let mut steps = 0;
            loop {
                let action = rng.gen_range(0..model.num_actions(&state));
                let step = model.step(&state, action, rng);
                ledger.add_future(&step.reward);
                steps += 1;
                if step.terminal {
                    break;
                }
                assert!(
                    steps <= model.horizon(),
                    "environment exceeded its declared horizon during rollout"
                );
                state = step.state;
            }
        }

        // Backpropagation, leaf to root. The cumulative return is the same
        // at every node on the walk, so each chance node is credited with
        // the utility of the same vector; the debug assertion pins that.
        let cumulative = ledger.cumulative();
        let utility = self.utility.eval(&cumulative)?;
        for &did in path_decisions.iter().rev() {
            self.tree.bump_decision(did);
        }
        for &cid in path_chances.iter().rev() {
            let node_utility = self.utility.eval(&cumulative)?;
            debug_assert_eq!(node_utility.to_bits(), utility.to_bits());
            self.tree.credit_chance(cid, node_utility);
            if matches!(self.kind, PlannerKind::Dmcts { .. }) {
                self.tree
                    .chance_bts_mut(cid)
                    .expect("every chance node of a Thompson planner has a distribution")
                    .update(node_utility, rng);
            }
        }

        Ok(IterationTrace {
            path_decisions,
            path_chances,
            leaf,
            cumulative,
            utility,
        })
    }

    /// Thompson step over a fully expanded decision node: draw one bootstrap
    /// replicate mean per child and take the argmax, ties to the lowest
    /// action index (only on exact float equality of the sampled means).
    pub fn thompson_select<R: Rng>(&self, id: DecisionId, rng: &mut R) -> ChanceId {
        let decision = self.tree.decision(id);
        let mut best: Option<(ChanceId, f64)> = None;
        for slot in &decision.children {
            let cid = slot.expect("Thompson selection requires a fully expanded node");
            let sampled = self
                .tree
                .chance(cid)
                .bts
                .as_ref()
                .expect("every chance node of a Thompson planner has a distribution")
                .sample_mean(rng);
            match best {
                Some((_, s)) if sampled <= s => {}
                _ => best = Some((cid, sampled)),
            }
        }
        best.expect("Thompson selection on a node with no actions").0
    }

    /// Moves the root to the observed outcome of executing `action`, for
    /// callers driving the environment themselves instead of through
    /// [`Planner::run_episode`].
    pub fn advance_root(&mut self, model: &M, action: usize, observed: &Step<M::State>) {
        let num_actions = if observed.terminal {
            0
        } else {
            model.num_actions(&observed.state)
        };
        self.tree.re_root(
            action,
            &observed.state,
            &observed.reward,
            observed.terminal,
            num_actions,
        );
    }

    /// Rewinds the root to the initial state (persistence on) or discards
    /// the tree (persistence off), readying the planner for a new episode.
    pub fn end_episode(&mut self, model: &M) {
        if self.persist_tree {
            self.tree.reset_root_to_home();
        } else {
            let initial = model.initial_state();
            let num_actions = model.num_actions(&initial);
            self.tree.reset_fresh(initial, num_actions);
        }
    }

    fn sample_outcome<R: Rng>(
        &mut self,
        model: &M,
        cid: ChanceId,
        ledger: &mut ReturnLedger,
        rng: &mut R,
    ) -> DecisionId {
        let (state, action) = {
            let chance = self.tree.chance(cid);
            (chance.state.clone(), chance.action)
        };
        let step = model.step(&state, action, rng);
        ledger.add_future(&step.reward);
        let num_actions = if step.terminal {
            0
        } else {
            model.num_actions(&step.state)
        };
        let (did, _) = self.tree.find_or_create_decision(
            cid,
            &step.state,
            &step.reward,
            step.terminal,
            num_actions,
        );
        did
    }

    /// Executes one full episode: plan `n_exec` iterations before each real
    /// step, act greedily on mean utility, move the root to the observed
    /// outcome. At the end the tree either rewinds to the initial root
    /// (persistence on) or is discarded.
    pub fn run_episode<R1: Rng, R2: Rng>(
        &mut self,
        model: &M,
        n_exec: usize,
        planner_rng: &mut R1,
        env_rng: &mut R2,
    ) -> Result<EpisodeResult<M::State>, PlanError> {
        let mut accrued = ReturnVector::zeros(self.objectives);
        let mut trajectory = Vec::new();
        let mut iterations_per_step = Vec::new();
        let mut state = model.initial_state();
        debug_assert_eq!(
            self.tree.decision(self.tree.root_id()).state,
            state,
            "episode started with the tree rooted away from the initial state"
        );
        let mut terminated = false;
        for _ in 0..model.horizon() {
            let action = self.plan(model, &accrued, n_exec, planner_rng)?;
            iterations_per_step.push(n_exec);
            let step = model.step(&state, action, env_rng);
            accrued.add_assign(&step.reward);
            trajectory.push(TimestepRecord {
                state,
                action,
                reward: step.reward.clone(),
            });
            self.advance_root(model, action, &step);
            state = step.state;
            if step.terminal {
                terminated = true;
                break;
            }
        }
        assert!(
            terminated,
            "environment failed to terminate within its declared horizon"
        );
        let utility = self.utility.eval(&accrued)?;
        self.end_episode(model);
        Ok(EpisodeResult {
            trajectory,
            cumulative: accrued,
            utility,
            iterations_per_step,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EnvironmentModel, Step};
    use crate::utility::{UtilityKind, UtilitySpec};
    use rand::{Rng, RngCore, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use std::collections::HashMap;
    use std::f64::consts::SQRT_2;

    /// One action, two steps, each paying an independent fair 0/1 coin.
    ///
    /// Under u(x) = max(0, x)^2 the value of the episode is
    /// E[(X1 + X2)^2] = (0 + 1 + 1 + 4) / 4 = 1.5, while summing per-step
    /// utilities would give E[X1^2] + E[X2^2] = 1.0. A planner that applies
    /// the utility to cumulative returns must estimate 1.5.
    struct TwoStepCoin;

    impl EnvironmentModel for TwoStepCoin {
        type State = usize;

        fn num_objectives(&self) -> usize {
            1
        }

        fn horizon(&self) -> usize {
            2
        }

        fn num_actions(&self, _state: &usize) -> usize {
            1
        }

        fn initial_state(&self) -> usize {
            0
        }

        fn step(&self, state: &usize, _action: usize, rng: &mut dyn RngCore) -> Step<usize> {
            let payoff = if rng.gen_bool(0.5) { 1.0 } else { 0.0 };
            Step {
                state: state + 1,
                reward: ReturnVector::new(vec![payoff]),
                terminal: state + 1 == 2,
            }
        }
    }

    /// Single action, stochastic episode length. From the start state a fair
    /// coin either ends the episode with reward 1 or moves to a middle state
    /// that then ends with reward 2. E[u] = 0.5 * 1 + 0.5 * 4 = 2.5 under
    /// the squared utility.
    struct CoinJump;

    impl EnvironmentModel for CoinJump {
        type State = u8;

        fn num_objectives(&self) -> usize {
            1
        }

        fn horizon(&self) -> usize {
            2
        }

        fn num_actions(&self, _state: &u8) -> usize {
            1
        }

        fn initial_state(&self) -> u8 {
            0
        }

        fn step(&self, state: &u8, _action: usize, rng: &mut dyn RngCore) -> Step<u8> {
            match state {
                0 => {
                    if rng.gen_bool(0.5) {
                        Step {
                            state: 2,
                            reward: ReturnVector::new(vec![1.0]),
                            terminal: true,
                        }
                    } else {
                        Step {
                            state: 1,
                            reward: ReturnVector::new(vec![0.0]),
                            terminal: false,
                        }
                    }
                }
                1 => Step {
                    state: 2,
                    reward: ReturnVector::new(vec![2.0]),
                    terminal: true,
                },
                _ => unreachable!("stepped a terminal state"),
            }
        }
    }

    /// Two actions over three steps. Action 0 pays 0.5 deterministically,
    /// action 1 pays a fair 0/1 coin. Gives trees with branching on both
    /// action and outcome.
    struct TwoActionGamble;

    impl EnvironmentModel for TwoActionGamble {
        type State = usize;

        fn num_objectives(&self) -> usize {
            1
        }

        fn horizon(&self) -> usize {
            3
        }

        fn num_actions(&self, _state: &usize) -> usize {
            2
        }

        fn initial_state(&self) -> usize {
            0
        }

        fn step(&self, state: &usize, action: usize, rng: &mut dyn RngCore) -> Step<usize> {
            let payoff = match action {
                0 => 0.5,
                1 => {
                    if rng.gen_bool(0.5) {
                        1.0
                    } else {
                        0.0
                    }
                }
                _ => unreachable!("unknown action"),
            };
            Step {
                state: state + 1,
                reward: ReturnVector::new(vec![payoff]),
                terminal: state + 1 == 3,
            }
        }
    }

    fn squared() -> UtilitySpec {
        UtilitySpec::new(UtilityKind::RiskSeekingSq)
    }

    fn nlu_kind() -> PlannerKind {
        PlannerKind::NluMcts {
            exploration: SQRT_2,
        }
    }

    fn dmcts_kind(replicates: usize) -> PlannerKind {
        PlannerKind::Dmcts {
            replicates,
            alpha_init: 1.0,
            beta_init: 1.0,
        }
    }

    fn root_action_mean<M: EnvironmentModel>(planner: &Planner<M>, action: usize) -> f64 {
        let tree = planner.tree();
        let chance = tree.decision(tree.root_id()).children[action]
            .expect("root action was never expanded");
        tree.chance(chance).mean_utility()
    }

    #[test]
    fn estimates_utility_of_summed_returns_not_sum_of_utilities() {
        let model = TwoStepCoin;
        let mut planner = Planner::new(
            &model,
            nlu_kind(),
            squared(),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let accrued = ReturnVector::zeros(1);
        for _ in 0..100_000 {
            planner.plan_once(&model, &accrued, &mut rng).unwrap();
        }
        let mean = root_action_mean(&planner, 0);
        assert!(
            (mean - 1.5).abs() < 0.02,
            "root estimate {mean} should approach E[(X1+X2)^2] = 1.5"
        );
        assert!(
            (mean - 1.0).abs() > 0.4,
            "root estimate {mean} should not approach the per-step sum 1.0"
        );
    }

    #[test]
    fn dmcts_estimates_match_the_same_target() {
        let model = TwoStepCoin;
        let mut planner = Planner::new(
            &model,
            dmcts_kind(10),
            squared(),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let accrued = ReturnVector::zeros(1);
        for _ in 0..100_000 {
            planner.plan_once(&model, &accrued, &mut rng).unwrap();
        }
        let mean = root_action_mean(&planner, 0);
        assert!((mean - 1.5).abs() < 0.02, "root estimate was {mean}");
    }

    #[test]
    fn handles_stochastic_termination_depth() {
        let model = CoinJump;
        let mut planner = Planner::new(
            &model,
            nlu_kind(),
            squared(),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let accrued = ReturnVector::zeros(1);
        for _ in 0..2_000 {
            planner.plan_once(&model, &accrued, &mut rng).unwrap();
        }
        let mean = root_action_mean(&planner, 0);
        assert!((mean - 2.5).abs() < 0.15, "root estimate was {mean}");
    }

    #[test]
    fn accrued_returns_shift_the_utility_argument() {
        // With 10 already banked, the two coins are evaluated through
        // u(10 + X1 + X2): (100 + 121 + 121 + 144) / 4 = 121.5.
        let model = TwoStepCoin;
        let mut planner = Planner::new(
            &model,
            nlu_kind(),
            squared(),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let accrued = ReturnVector::new(vec![10.0]);
        for _ in 0..50_000 {
            planner.plan_once(&model, &accrued, &mut rng).unwrap();
        }
        let mean = root_action_mean(&planner, 0);
        assert!((mean - 121.5).abs() < 0.5, "root estimate was {mean}");
    }

    #[test]
    fn visit_counts_obey_flow_conservation() {
        let model = TwoActionGamble;
        for kind in [nlu_kind(), dmcts_kind(20)] {
            let mut planner = Planner::new(
                &model,
                kind,
                squared(),
                true,
                DEFAULT_REWARD_MATCH_TOL,
            )
            .unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(17);
            let accrued = ReturnVector::zeros(1);
            let iterations = 500;
            let mut leaf_counts: HashMap<DecisionId, u64> = HashMap::new();
            for _ in 0..iterations {
                let trace = planner.plan_once(&model, &accrued, &mut rng).unwrap();
                *leaf_counts.entry(trace.leaf).or_insert(0) += 1;
            }
            let tree = planner.tree();
            assert_eq!(tree.decision(tree.root_id()).visits, iterations);
            for id in tree.chance_ids() {
                let chance = tree.chance(id);
                let child_sum: u64 = chance
                    .children
                    .iter()
                    .map(|&d| tree.decision(d).visits)
                    .sum();
                assert_eq!(
                    chance.visits, child_sum,
                    "every visit through a chance node must land in exactly one outcome"
                );
            }
            for id in tree.decision_ids() {
                let decision = tree.decision(id);
                let child_sum: u64 = decision
                    .children
                    .iter()
                    .flatten()
                    .map(|&c| tree.chance(c).visits)
                    .sum();
                let leaves = leaf_counts.get(&id).copied().unwrap_or(0);
                assert_eq!(
                    decision.visits,
                    child_sum + leaves,
                    "decision visits must split between descents and leaf stops"
                );
            }
        }
    }

    #[test]
    fn backprop_credits_exactly_the_traced_path() {
        let model = TwoActionGamble;
        let mut planner = Planner::new(
            &model,
            nlu_kind(),
            squared(),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let accrued = ReturnVector::zeros(1);
        for _ in 0..200 {
            planner.plan_once(&model, &accrued, &mut rng).unwrap();
        }
        let before: Vec<(u64, f64)> = planner
            .tree()
            .chance_ids()
            .map(|id| {
                let c = planner.tree().chance(id);
                (c.visits, c.total_utility)
            })
            .collect();
        let decisions_before: Vec<u64> = planner
            .tree()
            .decision_ids()
            .map(|id| planner.tree().decision(id).visits)
            .collect();
        let trace = planner.plan_once(&model, &accrued, &mut rng).unwrap();
        let tree = planner.tree();
        for (i, (visits, total)) in before.iter().enumerate() {
            let id = ChanceId(i as u32);
            let node = tree.chance(id);
            if trace.path_chances.contains(&id) {
                assert_eq!(node.visits, visits + 1);
                assert_eq!(
                    node.total_utility.to_bits(),
                    (total + trace.utility).to_bits(),
                    "credited utility must match the traced evaluation bit for bit"
                );
            } else {
                assert_eq!(node.visits, *visits);
                assert_eq!(node.total_utility.to_bits(), total.to_bits());
            }
        }
        for (i, visits) in decisions_before.iter().enumerate() {
            let id = DecisionId(i as u32);
            let expected = if trace.path_decisions.contains(&id) {
                visits + 1
            } else {
                *visits
            };
            assert_eq!(tree.decision(id).visits, expected);
        }
        assert_eq!(trace.utility, {
            let u = squared().eval(&trace.cumulative).unwrap();
            u
        });
    }

    #[test]
    fn same_seed_reproduces_episodes_bitwise() {
        for kind in [nlu_kind(), dmcts_kind(30)] {
            let run = |seed: u64| {
                let model = TwoActionGamble;
                let mut planner = Planner::new(
                    &model,
                    kind.clone(),
                    squared(),
                    true,
                    DEFAULT_REWARD_MATCH_TOL,
                )
                .unwrap();
                let mut plan_rng = ChaCha12Rng::seed_from_u64(seed);
                let mut env_rng = ChaCha12Rng::seed_from_u64(seed.wrapping_add(1));
                let mut utilities = Vec::new();
                for _ in 0..5 {
                    let result = planner
                        .run_episode(&model, 50, &mut plan_rng, &mut env_rng)
                        .unwrap();
                    assert_eq!(
                        result.utility.to_bits(),
                        squared().eval(&result.cumulative).unwrap().to_bits()
                    );
                    utilities.push(result.utility.to_bits());
                }
                utilities
            };
            assert_eq!(run(12), run(12));
            assert_ne!(run(12), run(13));
        }
    }

    #[test]
    fn expansion_picks_uniformly_among_untried_actions() {
        let model = TwoActionGamble;
        let mut first_action = [0u32; 2];
        for seed in 0..4_000 {
            let mut planner = Planner::new(
                &model,
                nlu_kind(),
                squared(),
                true,
                DEFAULT_REWARD_MATCH_TOL,
            )
            .unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let trace = planner
                .plan_once(&model, &ReturnVector::zeros(1), &mut rng)
                .unwrap();
            let first = planner.tree().chance(trace.path_chances[0]).action;
            first_action[first] += 1;
        }
        let share = first_action[0] as f64 / 4_000.0;
        assert!(
            (share - 0.5).abs() < 0.03,
            "first expansion picked action 0 with frequency {share}"
        );
    }

    #[test]
    fn thompson_selection_breaks_ties_stochastically() {
        // Two root actions with identical visit statistics but distinct
        // replicate contents: sampling replicates must pick each side about
        // half the time, where a deterministic rule would always agree.
        let model = TwoActionGamble;
        let mut counts = [0u32; 2];
        for seed in 0..2_000 {
            let mut planner = Planner::new(
                &model,
                dmcts_kind(100),
                squared(),
                true,
                DEFAULT_REWARD_MATCH_TOL,
            )
            .unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(1_000_000 + seed);
            for _ in 0..40 {
                planner
                    .plan_once(&model, &ReturnVector::zeros(1), &mut rng)
                    .unwrap();
            }
            let root = planner.tree.root_id();
            let picked = planner.thompson_select(root, &mut rng);
            counts[planner.tree.chance(picked).action] += 1;
        }
        let share = counts[0] as f64 / 2_000.0;
        assert!(
            share > 0.2 && share < 0.8,
            "thompson selection looks deterministic: action 0 share {share}"
        );
    }

    #[test]
    fn planning_from_terminal_root_is_an_error() {
        let model = TwoStepCoin;
        let mut planner = Planner::new(
            &model,
            nlu_kind(),
            squared(),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        planner
            .plan(&model, &ReturnVector::zeros(1), 10, &mut rng)
            .unwrap();
        let observed = Step {
            state: 2usize,
            reward: ReturnVector::new(vec![1.0]),
            terminal: true,
        };
        planner.advance_root(&model, 0, &observed);
        let err = planner
            .plan(&model, &ReturnVector::new(vec![1.0]), 10, &mut rng)
            .unwrap_err();
        assert!(matches!(err, PlanError::TerminalRoot));
    }

    #[test]
    fn zero_iterations_leave_no_action_to_recommend() {
        let model = TwoStepCoin;
        let mut planner = Planner::new(
            &model,
            nlu_kind(),
            squared(),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let err = planner
            .plan(&model, &ReturnVector::zeros(1), 0, &mut rng)
            .unwrap_err();
        assert!(matches!(err, PlanError::NoVisitedRootAction));
    }

    #[test]
    fn utility_arity_is_checked_against_the_model() {
        let model = TwoStepCoin;
        let two_obj = UtilitySpec::new(UtilityKind::U1HalfMax);
        let err = Planner::new(&model, nlu_kind(), two_obj, true, DEFAULT_REWARD_MATCH_TOL)
            .map(|_| ())
            .unwrap_err();
        assert!(matches!(
            err,
            PlanError::Utility(UtilityError::ArityMismatch { expected: 2, got: 1, .. })
        ));
        let pair_bandit = crate::envs::SingleArmDemo;
        let err = Planner::new(
            &pair_bandit,
            nlu_kind(),
            squared(),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .map(|_| ())
        .unwrap_err();
        assert!(matches!(
            err,
            PlanError::Utility(UtilityError::ArityMismatch { expected: 1, got: 2, .. })
        ));
        // a flexible-arity utility pairs with any objective count
        assert!(Planner::new(
            &model,
            nlu_kind(),
            UtilitySpec::new(UtilityKind::Product),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .is_ok());
    }

    #[test]
    fn dmcts_rejects_degenerate_posterior_settings() {
        let model = TwoStepCoin;
        let err = Planner::new(
            &model,
            PlannerKind::Dmcts {
                replicates: 0,
                alpha_init: 1.0,
                beta_init: 1.0,
            },
            squared(),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .map(|_| ())
        .unwrap_err();
        assert!(matches!(err, PlanError::Bts(BtsError::NoReplicates)));
        let err = Planner::new(
            &model,
            PlannerKind::Dmcts {
                replicates: 10,
                alpha_init: 1.0,
                beta_init: 0.0,
            },
            squared(),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .map(|_| ())
        .unwrap_err();
        assert!(matches!(err, PlanError::Bts(BtsError::NonPositiveBeta(_))));
    }

    #[test]
    fn tree_persistence_keeps_statistics_across_episodes() {
        let model = TwoActionGamble;
        let mut planner = Planner::new(
            &model,
            nlu_kind(),
            squared(),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .unwrap();
        let mut plan_rng = ChaCha12Rng::seed_from_u64(5);
        let mut env_rng = ChaCha12Rng::seed_from_u64(6);
        planner
            .run_episode(&model, 30, &mut plan_rng, &mut env_rng)
            .unwrap();
        let nodes_after_first = planner.tree().num_decision_nodes();
        let visits_after_first = planner.tree().decision(planner.tree().root_id()).visits;
        assert!(nodes_after_first > 1);
        assert!(visits_after_first > 0);
        assert_eq!(planner.tree().root_id(), planner.tree().home_id());
        planner
            .run_episode(&model, 30, &mut plan_rng, &mut env_rng)
            .unwrap();
        assert!(planner.tree().num_decision_nodes() >= nodes_after_first);
        assert!(
            planner.tree().decision(planner.tree().root_id()).visits > visits_after_first,
            "a persistent tree must keep accumulating root visits"
        );
    }

    #[test]
    fn disabling_persistence_discards_the_tree_between_episodes() {
        let model = TwoActionGamble;
        let mut planner = Planner::new(
            &model,
            nlu_kind(),
            squared(),
            false,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .unwrap();
        let mut plan_rng = ChaCha12Rng::seed_from_u64(5);
        let mut env_rng = ChaCha12Rng::seed_from_u64(6);
        planner
            .run_episode(&model, 30, &mut plan_rng, &mut env_rng)
            .unwrap();
        assert_eq!(planner.tree().num_decision_nodes(), 1);
        assert_eq!(planner.tree().num_chance_nodes(), 0);
        assert_eq!(planner.tree().decision(planner.tree().root_id()).visits, 0);
    }

    #[test]
    fn episode_trajectory_records_every_step() {
        let model = TwoActionGamble;
        let mut planner = Planner::new(
            &model,
            nlu_kind(),
            squared(),
            true,
            DEFAULT_REWARD_MATCH_TOL,
        )
        .unwrap();
        let mut plan_rng = ChaCha12Rng::seed_from_u64(5);
        let mut env_rng = ChaCha12Rng::seed_from_u64(6);
        let result = planner
            .run_episode(&model, 30, &mut plan_rng, &mut env_rng)
            .unwrap();
        assert_eq!(result.trajectory.len(), 3);
        assert_eq!(result.iterations_per_step, vec![30, 30, 30]);
        let mut total = ReturnVector::zeros(1);
        for record in &result.trajectory {
            total.add_assign(&record.reward);
        }
        assert!(total.approx_eq(&result.cumulative, 0.0));
    }
}
