//! The sparse belief tree grown by the search.
//!
//! Each node holds the scenarios that reach it (with their current states)
//! and four bounds:
//!
//! * `upper` (U) and `lower0` (L0): bounds on the empirical value of the
//!   node's scenarios, counted from the node;
//! * `mu` and `ell`: bounds on the best regularized value of the subtree,
//!   already weighted by `|scenarios| / K * gamma^depth`.
//!
//! Nodes live in an arena and refer to each other by index.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bounds::{node_upper, rollout_horizon, rollout_lower, DefaultPolicy, UpperBound};
use crate::pomdp::{next_random, Action, Obs, Particle, Pomdp};

pub type NodeId = usize;

/// Parameters shared by every node of one tree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeParams {
    /// Number of scenarios at the root.
    pub num_scenarios: usize,
    /// Deepest level that may be expanded.
    pub max_depth: usize,
    pub lambda: f64,
    pub xi: f64,
    pub discount: f64,
    /// Seed of the scenario streams.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionBranch {
    /// Sum of the immediate rewards of the node's live scenarios.
    pub reward_sum: f64,
    /// Children by observation, in first-encounter order.
    pub children: Vec<(Obs, NodeId)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DespotNode<S> {
    pub parent: Option<NodeId>,
    /// Action and observation leading here from the parent.
    pub edge: Option<(Action, Obs)>,
    pub depth: usize,
    pub particles: Vec<Particle<S>>,
    /// One entry per action once expanded; empty for leaves.
    pub branches: Vec<ActionBranch>,
    pub upper: f64,
    pub lower0: f64,
    pub mu: f64,
    pub ell: f64,
    pub upper0: f64,
    pub mu0: f64,
    pub ell0: f64,
    /// Bounds collapsed to their defaults for good.
    pub pruned: bool,
    /// Trial during which the node was expanded.
    pub expanded_in: Option<usize>,
}

impl<S> DespotNode<S> {
    pub fn is_expanded(&self) -> bool {
        !self.branches.is_empty()
    }

    pub fn gap(&self) -> f64 {
        self.mu - self.ell
    }
}

/// `|scenarios| / K * gamma^depth`.
pub fn node_weight(count: usize, num_scenarios: usize, depth: usize, discount: f64) -> f64 {
    count as f64 / num_scenarios as f64 * discount.powi(depth as i32)
}

/// Initial `(mu, ell)` of a node from its value bounds:
/// `ell0 = w * L0` and `mu0 = max(ell0, w * U0 - lambda)` with `w` the node
/// weight.
pub fn init_node_bounds(
    upper0: f64,
    lower0: f64,
    lambda: f64,
    count: usize,
    num_scenarios: usize,
    depth: usize,
    discount: f64,
) -> (f64, f64) {
    let w = node_weight(count, num_scenarios, depth, discount);
    let ell0 = w * lower0;
    let mu0 = ell0.max(w * upper0 - lambda);
    (mu0, ell0)
}

/// `rho(b, a) = gamma^depth / K * sum of immediate rewards - lambda`.
pub fn rho_value(reward_sum: f64, depth: usize, num_scenarios: usize, discount: f64, lambda: f64) -> f64 {
    discount.powi(depth as i32) * reward_sum / num_scenarios as f64 - lambda
}

/// `E(b) = gap(b) - |scenarios| / K * xi * root_gap`.
pub fn excess_uncertainty_value(gap: f64, count: usize, num_scenarios: usize, xi: f64, root_gap: f64) -> f64 {
    gap - count as f64 / num_scenarios as f64 * xi * root_gap
}

/// Whether an ancestor with the given statistics blocks a node `path_len`
/// nodes down (both ends counted).
pub fn blocks(weight: f64, upper: f64, lower0: f64, lambda: f64, path_len: usize) -> bool {
    weight * (upper - lower0) <= lambda * path_len as f64
}

/// Index of the largest value, lowest index on ties.
pub(crate) fn argmax(values: impl IntoIterator<Item = f64>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if best.map_or(true, |(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct DespotTree<S> {
    pub nodes: Vec<DespotNode<S>>,
    pub params: TreeParams,
}

pub const ROOT: NodeId = 0;

impl<S: Clone> DespotTree<S> {
    /// A tree holding only the root, with bounds initialized.
    pub fn new<M, U, P>(
        model: &M,
        particles: Vec<Particle<S>>,
        params: TreeParams,
        upper: &mut U,
        policy: &P,
    ) -> Self
    where
        M: Pomdp<State = S>,
        U: UpperBound<M> + ?Sized,
        P: DefaultPolicy<M> + ?Sized,
    {
        let mut tree = DespotTree { nodes: Vec::new(), params };
        tree.add_node(model, None, None, 0, particles, upper, policy);
        tree
    }

    pub fn root(&self) -> &DespotNode<S> {
        &self.nodes[ROOT]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight(&self, id: NodeId) -> f64 {
        let n = &self.nodes[id];
        node_weight(n.particles.len(), self.params.num_scenarios, n.depth, self.params.discount)
    }

    #[allow(clippy::too_many_arguments)]
    fn add_node<M, U, P>(
        &mut self,
        model: &M,
        parent: Option<NodeId>,
        edge: Option<(Action, Obs)>,
        depth: usize,
        particles: Vec<Particle<S>>,
        upper: &mut U,
        policy: &P,
    ) -> NodeId
    where
        M: Pomdp<State = S>,
        U: UpperBound<M> + ?Sized,
        P: DefaultPolicy<M> + ?Sized,
    {
        let p = &self.params;
        let u0 = node_upper(upper, model, &particles, depth);
        let horizon = rollout_horizon(p.max_depth, depth);
        let l0 = rollout_lower(model, policy, &particles, depth, horizon, p.seed);
        let (mu0, ell0) = init_node_bounds(u0, l0, p.lambda, particles.len(), p.num_scenarios, depth, p.discount);
        self.nodes.push(DespotNode {
            parent,
            edge,
            depth,
            particles,
            branches: Vec::new(),
            upper: u0,
            lower0: l0,
            mu: mu0,
            ell: ell0,
            upper0: u0,
            mu0,
            ell0,
            pruned: false,
            expanded_in: None,
        });
        self.nodes.len() - 1
    }

    /// Expand a leaf one level: step every live scenario under every action
    /// and group the results by observation. Terminal scenarios are not
    /// carried into children. A node without live scenarios stays a leaf.
    pub fn expand<M, U, P>(&mut self, id: NodeId, model: &M, upper: &mut U, policy: &P, trial: usize) -> usize
    where
        M: Pomdp<State = S>,
        U: UpperBound<M> + ?Sized,
        P: DefaultPolicy<M> + ?Sized,
    {
        assert!(!self.nodes[id].is_expanded(), "node {id} already expanded");
        let depth = self.nodes[id].depth;
        let live: Vec<Particle<S>> = self.nodes[id]
            .particles
            .iter()
            .filter(|p| !model.is_terminal(&p.state))
            .cloned()
            .collect();
        if live.is_empty() {
            return 0;
        }
        let seed = self.params.seed;
        let mut branches = Vec::with_capacity(model.num_actions());
        let mut created = 0;
        for a in 0..model.num_actions() {
            let mut reward_sum = 0.0;
            let mut groups: Vec<(Obs, Vec<Particle<S>>)> = Vec::new();
            for p in &live {
                let out = model.step(&p.state, a, next_random(seed, p.scenario, depth + 1));
                reward_sum += out.reward;
                let child = Particle { scenario: p.scenario, state: out.next_state };
                match groups.iter_mut().find(|(z, _)| *z == out.observation) {
                    Some((_, g)) => g.push(child),
                    None => groups.push((out.observation, vec![child])),
                }
            }
            let mut children = Vec::with_capacity(groups.len());
            for (z, g) in groups {
                let c = self.add_node(model, Some(id), Some((a, z)), depth + 1, g, upper, policy);
                children.push((z, c));
                created += 1;
            }
            branches.push(ActionBranch { reward_sum, children });
        }
        let node = &mut self.nodes[id];
        node.branches = branches;
        node.expanded_in = Some(trial);
        created
    }

    pub fn rho(&self, id: NodeId, a: Action) -> f64 {
        let n = &self.nodes[id];
        let p = &self.params;
        rho_value(n.branches[a].reward_sum, n.depth, p.num_scenarios, p.discount, p.lambda)
    }

    /// `mu(b, a) = rho(b, a) + sum over children of mu`.
    pub fn action_mu(&self, id: NodeId, a: Action) -> f64 {
        self.rho(id, a) + self.nodes[id].branches[a].children.iter().map(|&(_, c)| self.nodes[c].mu).sum::<f64>()
    }

    /// `ell(b, a) = rho(b, a) + sum over children of ell`.
    pub fn action_ell(&self, id: NodeId, a: Action) -> f64 {
        self.rho(id, a) + self.nodes[id].branches[a].children.iter().map(|&(_, c)| self.nodes[c].ell).sum::<f64>()
    }

    /// `U(b, a)`: mean immediate reward plus discounted, count-weighted
    /// child bounds.
    pub fn action_upper(&self, id: NodeId, a: Action) -> f64 {
        let n = &self.nodes[id];
        let count = n.particles.len() as f64;
        let children: f64 = n.branches[a]
            .children
            .iter()
            .map(|&(_, c)| self.nodes[c].particles.len() as f64 * self.nodes[c].upper)
            .sum();
        (n.branches[a].reward_sum + self.params.discount * children) / count
    }

    /// Re-apply the three backup equations at one node. `U` also counts
    /// running the default policy, which can win near the depth limit when
    /// rewards are negative. Leaves and pruned nodes keep their values.
    pub fn backup_node(&mut self, id: NodeId) {
        let n = &self.nodes[id];
        if n.pruned || !n.is_expanded() {
            return;
        }
        let actions = n.branches.len();
        let (ell0, lower0) = (n.ell0, n.lower0);
        let mu = (0..actions).map(|a| self.action_mu(id, a)).fold(ell0, f64::max);
        let ell = (0..actions).map(|a| self.action_ell(id, a)).fold(ell0, f64::max);
        // running the default policy here is also a choice
        let upper = (0..actions).map(|a| self.action_upper(id, a)).fold(lower0, f64::max);
        let n = &mut self.nodes[id];
        n.mu = mu;
        n.ell = ell;
        n.upper = upper;
    }

    /// Back up every node from `id` to the root, child before parent.
    pub fn backup_path(&mut self, id: NodeId) {
        let mut cur = Some(id);
        while let Some(x) = cur {
            self.backup_node(x);
            cur = self.nodes[x].parent;
        }
    }

    /// Collapse a node's bounds to the default policy's values.
    pub fn make_default(&mut self, id: NodeId) {
        let n = &mut self.nodes[id];
        n.upper = n.lower0;
        n.mu = n.ell0;
        n.ell = n.ell0;
        n.pruned = true;
    }

    pub fn root_gap(&self) -> f64 {
        self.nodes[ROOT].gap()
    }

    pub fn excess_uncertainty(&self, id: NodeId, root_gap: f64) -> f64 {
        let n = &self.nodes[id];
        let p = &self.params;
        excess_uncertainty_value(n.gap(), n.particles.len(), p.num_scenarios, p.xi, root_gap)
    }

    /// Whether `ancestor` (which may be `id` itself) blocks `id`.
    pub fn is_blocked(&self, id: NodeId, ancestor: NodeId) -> bool {
        let a = &self.nodes[ancestor];
        let path_len = self.nodes[id].depth - a.depth + 1;
        blocks(self.weight(ancestor), a.upper, a.lower0, self.params.lambda, path_len)
    }

    /// Whether any node on the path from the root to `id` blocks `id`.
    pub fn blocked_by_any(&self, id: NodeId) -> bool {
        let mut cur = Some(id);
        while let Some(x) = cur {
            if self.is_blocked(id, x) {
                return true;
            }
            cur = self.nodes[x].parent;
        }
        false
    }

    /// `argmax_a ell(root, a)`, replaced by `default_action` when the root
    /// was never expanded or the default policy's value is strictly better.
    pub fn extract_root_action(&self, default_action: impl FnOnce() -> Action) -> Action {
        let root = &self.nodes[ROOT];
        if !root.is_expanded() {
            return default_action();
        }
        let (best, value) = argmax((0..root.branches.len()).map(|a| self.action_ell(ROOT, a))).unwrap();
        if root.ell0 >= value {
            default_action()
        } else {
            best
        }
    }

    /// The policy implied by the lower bounds: at each expanded node, the
    /// action maximizing `ell(b, a)` unless the default policy does at least
    /// as well.
    pub fn lower_policy(&self) -> PolicyTree {
        let mut out = PolicyTree::default();
        self.lower_policy_rec(ROOT, &mut out);
        out
    }

    fn lower_policy_rec(&self, id: NodeId, out: &mut PolicyTree) -> usize {
        let n = &self.nodes[id];
        let slot = out.nodes.len();
        out.nodes.push(PolicyNode { id: slot, action: None, depth: n.depth, edges: BTreeMap::new(), default: true });
        if n.pruned || !n.is_expanded() {
            return slot;
        }
        let (best, value) = argmax((0..n.branches.len()).map(|a| self.action_ell(id, a))).unwrap();
        if n.ell0 >= value {
            return slot;
        }
        let mut edges = BTreeMap::new();
        for &(z, c) in &n.branches[best].children {
            edges.insert(z, self.lower_policy_rec(c, out));
        }
        let node = &mut out.nodes[slot];
        node.action = Some(best);
        node.default = false;
        node.edges = edges;
        slot
    }
}

/// A policy as a tree of actions with observation-labelled edges. Nodes
/// marked `default` (and observations without an edge) hand control to the
/// default policy.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolicyTree {
    pub nodes: Vec<PolicyNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyNode {
    pub id: usize,
    pub action: Option<Action>,
    pub depth: usize,
    pub edges: BTreeMap<Obs, usize>,
    pub default: bool,
}

impl PolicyTree {
    /// A tree whose root already defers to the default policy.
    pub fn singleton() -> Self {
        PolicyTree {
            nodes: vec![PolicyNode { id: 0, action: None, depth: 0, edges: BTreeMap::new(), default: true }],
        }
    }

    /// Number of internal (non-default) nodes.
    pub fn size(&self) -> usize {
        self.nodes.iter().filter(|n| !n.default).count()
    }

    pub fn root_action(&self) -> Option<Action> {
        self.nodes.first().and_then(|n| n.action)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "nodes": self.nodes.iter().map(|n| serde_json::json!({
                "id": n.id,
                "action": n.action,
                "depth": n.depth,
                "edges": n.edges.iter().map(|(z, c)| (z.to_string(), serde_json::json!(c))).collect::<serde_json::Map<_, _>>(),
                "default": n.default,
            })).collect::<Vec<_>>()
        })
    }

    /// Average discounted return of the policy over `particles`, following
    /// each edge with the scenarios that produce it and rolling out
    /// `default` below default nodes and unsampled observations.
    pub fn evaluate<M, P>(
        &self,
        model: &M,
        policy: &P,
        particles: &[Particle<M::State>],
        max_depth: usize,
        seed: u64,
    ) -> f64
    where
        M: Pomdp,
        P: DefaultPolicy<M> + ?Sized,
    {
        if particles.is_empty() {
            return 0.0;
        }
        self.evaluate_rec(0, model, policy, particles, 0, max_depth, seed) / particles.len() as f64
    }

    /// Sum (not mean) of the particles' discounted returns from `depth`.
    #[allow(clippy::too_many_arguments)]
    fn evaluate_rec<M, P>(
        &self,
        slot: usize,
        model: &M,
        policy: &P,
        particles: &[Particle<M::State>],
        depth: usize,
        max_depth: usize,
        seed: u64,
    ) -> f64
    where
        M: Pomdp,
        P: DefaultPolicy<M> + ?Sized,
    {
        let node = &self.nodes[slot];
        let horizon = rollout_horizon(max_depth, depth);
        let Some(a) = node.action else {
            return rollout_lower(model, policy, particles, depth, horizon, seed) * particles.len() as f64;
        };
        let mut total = 0.0;
        let mut groups: Vec<(Obs, Vec<Particle<M::State>>)> = Vec::new();
        for p in particles.iter().filter(|p| !model.is_terminal(&p.state)) {
            let out = model.step(&p.state, a, next_random(seed, p.scenario, depth + 1));
            total += out.reward;
            let child = Particle { scenario: p.scenario, state: out.next_state };
            match groups.iter_mut().find(|(z, _)| *z == out.observation) {
                Some((_, g)) => g.push(child),
                None => groups.push((out.observation, vec![child])),
            }
        }
        let g = model.discount();
        for (z, group) in groups {
            let below = match node.edges.get(&z) {
                Some(&c) => self.evaluate_rec(c, model, policy, &group, depth + 1, max_depth, seed),
                None => {
                    let h = rollout_horizon(max_depth, depth + 1);
                    rollout_lower(model, policy, &group, depth + 1, h, seed) * group.len() as f64
                }
            };
            total += g * below;
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{FixedAction, UninformedUpper};
    use crate::domains::adventurer::{AdventurerModel, STAY};
    use crate::domains::bridge::{BridgeModel, RESCUE};
    use crate::domains::BridgeState;

    fn params(k: usize) -> TreeParams {
        TreeParams { num_scenarios: k, max_depth: 10, lambda: 0.0, xi: 0.95, discount: 0.95, seed: 1 }
    }

    #[test]
    fn init_bounds_examples() {
        let (mu0, ell0) = init_node_bounds(10.0, 4.0, 0.1, 100, 500, 2, 0.95);
        assert!((ell0 - 0.722).abs() < 1e-12);
        assert!((mu0 - 1.705).abs() < 1e-12);
        let (mu0, ell0) = init_node_bounds(10.0, 4.0, 0.0, 7, 7, 0, 0.95);
        assert_eq!((mu0, ell0), (10.0, 4.0));
        let (mu0, ell0) = init_node_bounds(4.0, 4.0, 0.5, 7, 7, 0, 0.95);
        assert_eq!(mu0, ell0);
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho_value(-2.0, 0, 2, 0.95, 0.0), -1.0);
        assert!((rho_value(10.0, 1, 4, 0.95, 0.1) - 2.275).abs() < 1e-12);
        let a = rho_value(3.0, 2, 5, 0.9, 0.2);
        assert!((rho_value(3.0, 2, 5, 0.9, 0.7) - (a - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn excess_uncertainty_examples() {
        assert!((excess_uncertainty_value(1.0, 500, 500, 0.95, 1.0) - 0.05).abs() < 1e-12);
        assert!((excess_uncertainty_value(0.3, 50, 500, 0.95, 2.0) - 0.11).abs() < 1e-12);
        assert!(excess_uncertainty_value(0.0, 50, 500, 0.95, 0.0) <= 0.0);
    }

    #[test]
    fn blocking_examples() {
        assert!(blocks(1.0, 0.5, 0.5, 0.1, 1));
        assert!(!blocks(1.0, 0.6, 0.5, 0.0, 4));
        assert!(blocks(1.0, 0.5, 0.5, 0.0, 4));
        assert!(blocks(1.0, 10.5, 10.0, 0.1, 6));
        assert!(!blocks(1.0, 10.5, 10.0, 0.1, 4));
    }

    #[test]
    fn bridge_expansion_has_one_child_per_action() {
        let m = BridgeModel::default();
        let particles: Vec<_> = (0..5).map(|i| Particle { scenario: i, state: BridgeState(i as u8 % 2) }).collect();
        let mut tree = DespotTree::new(&m, particles, params(5), &mut UninformedUpper, &FixedAction(RESCUE));
        let created = tree.expand(ROOT, &m, &mut UninformedUpper, &FixedAction(RESCUE), 0);
        assert_eq!(created, 3);
        for b in &tree.root().branches {
            assert_eq!(b.children.len(), 1);
            assert_eq!(tree.nodes[b.children[0].1].particles.len(), 5);
        }
    }

    #[test]
    fn adventurer_children_partition_scenarios() {
        let m = AdventurerModel::two_values();
        let particles: Vec<_> = (0..500).map(|i| Particle { scenario: i, state: m.start((i % 2) as u16) }).collect();
        let mut tree = DespotTree::new(&m, particles, params(500), &mut UninformedUpper, &FixedAction(STAY));
        tree.expand(ROOT, &m, &mut UninformedUpper, &FixedAction(STAY), 0);
        for b in &tree.root().branches {
            let total: usize = b.children.iter().map(|&(_, c)| tree.nodes[c].particles.len()).sum();
            assert_eq!(total, 500);
            assert_eq!(b.children.len(), 2);
        }
    }

    #[test]
    fn single_scenario_has_single_child() {
        let m = AdventurerModel::fifty_values();
        let particles = vec![Particle { scenario: 3, state: m.start(4) }];
        let mut tree = DespotTree::new(&m, particles, params(1), &mut UninformedUpper, &FixedAction(STAY));
        tree.expand(ROOT, &m, &mut UninformedUpper, &FixedAction(STAY), 0);
        assert!(tree.root().branches.iter().all(|b| b.children.len() == 1));
    }

    #[test]
    fn weighted_upper_backup() {
        // two scenarios, one action with zero reward, children with U = 10
        let m = BridgeModel::default();
        let particles: Vec<_> = (0..2).map(|i| Particle { scenario: i, state: BridgeState(3) }).collect();
        let mut tree = DespotTree::new(&m, particles, params(2), &mut UninformedUpper, &FixedAction(RESCUE));
        tree.nodes.push(tree.nodes[0].clone());
        tree.nodes.push(tree.nodes[0].clone());
        for c in [1, 2] {
            tree.nodes[c].particles.truncate(1);
            tree.nodes[c].upper = 10.0;
            tree.nodes[c].parent = Some(ROOT);
        }
        tree.nodes[ROOT].branches = vec![ActionBranch { reward_sum: 0.0, children: vec![(0, 1), (1, 2)] }];
        tree.backup_path(ROOT);
        assert!((tree.root().upper - 9.5).abs() < 1e-12);
    }

    #[test]
    fn leaf_backup_is_noop_and_equal_children_close_gap() {
        let m = BridgeModel::default();
        let particles: Vec<_> = (0..4).map(|i| Particle { scenario: i, state: BridgeState(2) }).collect();
        let mut tree = DespotTree::new(&m, particles, params(4), &mut UninformedUpper, &FixedAction(RESCUE));
        let before = tree.root().clone();
        tree.backup_path(ROOT);
        assert_eq!(tree.root(), &before);
        tree.expand(ROOT, &m, &mut UninformedUpper, &FixedAction(RESCUE), 0);
        for b in tree.root().branches.clone() {
            for (_, c) in b.children {
                tree.make_default(c);
            }
        }
        tree.backup_path(ROOT);
        assert_eq!(tree.root().mu, tree.root().ell);
    }

    #[test]
    fn unexpanded_root_uses_default() {
        let m = BridgeModel::default();
        let particles = vec![Particle { scenario: 0, state: BridgeState(0) }];
        let tree = DespotTree::new(&m, particles, params(1), &mut UninformedUpper, &FixedAction(RESCUE));
        assert_eq!(tree.extract_root_action(|| RESCUE), RESCUE);
        assert_eq!(tree.lower_policy().size(), 0);
    }

    #[test]
    fn equal_values_pick_lowest_action() {
        assert_eq!(argmax([1.0, 1.0, 0.5]), Some((0, 1.0)));
        assert_eq!(argmax([0.0, 2.0, 2.0]), Some((1, 2.0)));
    }

    #[test]
    fn policy_tree_json_shape() {
        let mut t = PolicyTree::singleton();
        t.nodes[0].action = Some(1);
        t.nodes[0].default = false;
        t.nodes[0].edges.insert(4, 1);
        t.nodes.push(PolicyNode { id: 1, action: None, depth: 1, edges: BTreeMap::new(), default: true });
        let j = t.to_json();
        assert_eq!(j["nodes"][0]["edges"]["4"], 1);
        assert_eq!(j["nodes"][1]["default"], true);
        assert_eq!(t.size(), 1);
    }
}
