//! Arena-backed expectimax tree.
//!
//! Decision nodes (a state, one slot per action) alternate with chance nodes
//! (a state-action pair whose children are the sampled outcomes, keyed by the
//! observed successor state and reward). Nodes live in flat arenas and refer
//! to each other by id, which keeps re-rooting cheap: executing an action
//! just moves the root pointer to the matching outcome child and every
//! statistic in the retained subtree survives.

use crate::bts::BtsDistribution;
use crate::returns::ReturnVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DecisionId(pub(crate) u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChanceId(pub(crate) u32);

impl DecisionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ChanceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Replicate layout for the bootstrap distribution attached to each chance
/// node when the tree serves a Thompson-sampling planner.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BtsInit {
    pub replicates: usize,
    pub alpha: f64,
    pub beta: f64,
}

/// A state in which the planner picks an action.
#[derive(Clone, Debug)]
pub struct DecisionNode<S> {
    pub state: S,
    /// Reward observed on the edge from the parent chance node; part of the
    /// outcome key together with `state`. Empty for the initial root.
    pub edge_reward: ReturnVector,
    pub visits: u64,
    /// One slot per action; `None` until the action is expanded. Terminal
    /// nodes have no slots.
    pub children: Vec<Option<ChanceId>>,
    pub parent: Option<ChanceId>,
    pub terminal: bool,
}

impl<S> DecisionNode<S> {
    pub fn unexpanded_actions(&self) -> impl Iterator<Item = usize> + '_ {
        self.children
            .iter()
            .enumerate()
            .filter_map(|(a, c)| c.is_none().then_some(a))
    }

    pub fn is_fully_expanded(&self) -> bool {
        self.children.iter().all(|c| c.is_some())
    }
}

/// A state-action pair whose children are sampled outcomes.
#[derive(Clone, Debug)]
pub struct ChanceNode<S> {
    pub state: S,
    pub action: usize,
    /// Sum of utilities backpropagated through this node.
    pub total_utility: f64,
    pub visits: u64,
    /// Present when the tree serves a Thompson-sampling planner.
    pub bts: Option<BtsDistribution>,
    pub children: Vec<DecisionId>,
    pub parent: DecisionId,
}

impl<S> ChanceNode<S> {
    /// Empirical mean utility of iterations through this node.
    pub fn mean_utility(&self) -> f64 {
        assert!(self.visits > 0, "mean utility of an unvisited chance node");
        self.total_utility / self.visits as f64
    }
}

/// UCB score of a chance node under its decision parent.
pub fn ucb_score(total_utility: f64, child_visits: u64, parent_visits: u64, exploration: f64) -> f64 {
    assert!(child_visits > 0, "UCB scored an unvisited chance node");
    total_utility / child_visits as f64
        + exploration * ((parent_visits as f64).ln() / child_visits as f64).sqrt()
}

/// Aggregate node statistics at one depth below the current root, for
/// debugging and memory profiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepthStats {
    pub depth: usize,
    pub decision_nodes: usize,
    pub chance_nodes: usize,
    pub decision_visits: u64,
}

#[derive(Clone, Debug)]
pub struct SearchTree<S> {
    decisions: Vec<DecisionNode<S>>,
    chances: Vec<ChanceNode<S>>,
    root: DecisionId,
    home: DecisionId,
    reward_tol: f64,
    bts_init: Option<BtsInit>,
}

impl<S: Clone + PartialEq + std::fmt::Debug> SearchTree<S> {
    /// `reward_tol` is the absolute tolerance used to match sampled rewards
    /// against existing outcome children; 0.0 demands exact equality.
    pub fn new(
        initial_state: S,
        num_actions: usize,
        reward_tol: f64,
        bts_init: Option<BtsInit>,
    ) -> Self {
        let root = DecisionNode {
            state: initial_state,
            edge_reward: ReturnVector::new(Vec::new()),
            visits: 0,
            children: vec![None; num_actions],
            parent: None,
            terminal: false,
        };
        SearchTree {
            decisions: vec![root],
            chances: Vec::new(),
            root: DecisionId(0),
            home: DecisionId(0),
            reward_tol,
            bts_init,
        }
    }

    pub fn root_id(&self) -> DecisionId {
        self.root
    }

    /// The initial-state root that episode resets return to.
    pub fn home_id(&self) -> DecisionId {
        self.home
    }

    pub fn reward_tol(&self) -> f64 {
        self.reward_tol
    }

    pub fn num_decision_nodes(&self) -> usize {
        self.decisions.len()
    }

    pub fn num_chance_nodes(&self) -> usize {
        self.chances.len()
    }

    pub fn decision_ids(&self) -> impl Iterator<Item = DecisionId> {
        (0..self.decisions.len() as u32).map(DecisionId)
    }

    pub fn chance_ids(&self) -> impl Iterator<Item = ChanceId> {
        (0..self.chances.len() as u32).map(ChanceId)
    }

    pub fn decision(&self, id: DecisionId) -> &DecisionNode<S> {
        &self.decisions[id.index()]
    }

    pub fn chance(&self, id: ChanceId) -> &ChanceNode<S> {
        &self.chances[id.index()]
    }

    /// Creates the chance child for an action slot that must still be empty.
    pub fn expand_action(&mut self, id: DecisionId, action: usize) -> ChanceId {
        let bts = self.bts_init.map(|init| {
            BtsDistribution::new(init.replicates, init.alpha, init.beta)
                .expect("bootstrap layout was validated at planner construction")
        });
        let decision = &self.decisions[id.index()];
        assert!(
            decision.children[action].is_none(),
            "action {action} is already expanded"
        );
        let chance = ChanceNode {
            state: decision.state.clone(),
            action,
            total_utility: 0.0,
            visits: 0,
            bts,
            children: Vec::new(),
            parent: id,
        };
        let cid = ChanceId(self.chances.len() as u32);
        self.chances.push(chance);
        self.decisions[id.index()].children[action] = Some(cid);
        cid
    }

    /// Finds the outcome child matching `(state, reward)` within the reward
    /// tolerance, creating it if the outcome has not been sampled before.
    pub fn find_or_create_decision(
        &mut self,
        id: ChanceId,
        state: &S,
        reward: &ReturnVector,
        terminal: bool,
        num_actions: usize,
    ) -> (DecisionId, bool) {
        let chance = &self.chances[id.index()];
        for &child in &chance.children {
            let node = &self.decisions[child.index()];
            if node.state == *state && node.edge_reward.approx_eq(reward, self.reward_tol) {
                return (child, false);
            }
        }
        let node = DecisionNode {
            state: state.clone(),
            edge_reward: reward.clone(),
            visits: 0,
            children: if terminal { Vec::new() } else { vec![None; num_actions] },
            parent: Some(id),
            terminal,
        };
        let did = DecisionId(self.decisions.len() as u32);
        self.decisions.push(node);
        self.chances[id.index()].children.push(did);
        (did, true)
    }

    /// Highest-UCB child of a fully expanded decision node, ties broken
    /// towards the lowest action index (by strict comparison, so only exact
    /// float equality falls through to the earlier action).
    pub fn best_child_ucb(&self, id: DecisionId, exploration: f64) -> (usize, ChanceId) {
        let decision = &self.decisions[id.index()];
        let parent_visits = decision.visits;
        let mut best: Option<(usize, ChanceId, f64)> = None;
        for (action, slot) in decision.children.iter().enumerate() {
            let cid = slot.expect("UCB selection requires a fully expanded node");
            let chance = &self.chances[cid.index()];
            let score = ucb_score(chance.total_utility, chance.visits, parent_visits, exploration);
            match best {
                Some((_, _, s)) if score <= s => {}
                _ => best = Some((action, cid, score)),
            }
        }
        let (action, cid, _) = best.expect("UCB selection on a node with no actions");
        (action, cid)
    }

    /// Expanded action with the highest mean utility, ties broken towards
    /// the lowest action index. `None` if no child has been visited.
    pub fn best_action_by_mean(&self, id: DecisionId) -> Option<usize> {
        let decision = &self.decisions[id.index()];
        let mut best: Option<(usize, f64)> = None;
        for (action, slot) in decision.children.iter().enumerate() {
            let Some(cid) = slot else { continue };
            let chance = &self.chances[cid.index()];
            if chance.visits == 0 {
                continue;
            }
            let mean = chance.mean_utility();
            match best {
                Some((_, m)) if mean <= m => {}
                _ => best = Some((action, mean)),
            }
        }
        best.map(|(action, _)| action)
    }

    /// Adds one iteration's utility to a chance node.
    pub fn credit_chance(&mut self, id: ChanceId, utility: f64) {
        let chance = &mut self.chances[id.index()];
        chance.total_utility += utility;
        chance.visits += 1;
    }

    pub fn bump_decision(&mut self, id: DecisionId) {
        self.decisions[id.index()].visits += 1;
    }

    pub fn chance_bts_mut(&mut self, id: ChanceId) -> Option<&mut BtsDistribution> {
        self.chances[id.index()].bts.as_mut()
    }

    /// Moves the root to the outcome child of `action` matching the observed
    /// `(state, reward)`, creating nodes for never-sampled outcomes. The
    /// subtree keeps all statistics.
    pub fn re_root(
        &mut self,
        action: usize,
        state: &S,
        reward: &ReturnVector,
        terminal: bool,
        num_actions: usize,
    ) -> DecisionId {
        let cid = match self.decisions[self.root.index()].children[action] {
            Some(cid) => cid,
            None => self.expand_action(self.root, action),
        };
        let (did, _) = self.find_or_create_decision(cid, state, reward, terminal, num_actions);
        self.root = did;
        did
    }

    /// Points the root back at the initial state for the next episode,
    /// keeping the whole tree.
    pub fn reset_root_to_home(&mut self) {
        self.root = self.home;
    }

    /// Discards the whole tree and starts over from the initial state.
    pub fn reset_fresh(&mut self, initial_state: S, num_actions: usize) {
        self.decisions.clear();
        self.chances.clear();
        self.decisions.push(DecisionNode {
            state: initial_state,
            edge_reward: ReturnVector::new(Vec::new()),
            visits: 0,
            children: vec![None; num_actions],
            parent: None,
            terminal: false,
        });
        self.root = DecisionId(0);
        self.home = DecisionId(0);
    }

    /// Node and visit counts per depth below the current root.
    pub fn depth_profile(&self) -> Vec<DepthStats> {
        let mut out: Vec<DepthStats> = Vec::new();
        let mut frontier = vec![self.root];
        let mut depth = 0;
        while !frontier.is_empty() {
            let mut stats = DepthStats {
                depth,
                decision_nodes: 0,
                chance_nodes: 0,
                decision_visits: 0,
            };
            let mut next = Vec::new();
            for did in frontier {
                let node = &self.decisions[did.index()];
                stats.decision_nodes += 1;
                stats.decision_visits += node.visits;
                for slot in node.children.iter().flatten() {
                    stats.chance_nodes += 1;
                    next.extend(self.chances[slot.index()].children.iter().copied());
                }
            }
            out.push(stats);
            frontier = next;
            depth += 1;
        }
        out
    }
}
