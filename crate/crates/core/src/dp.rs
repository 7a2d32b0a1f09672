//! Exact dynamic programming over the full sparse tree.
//!
//! Every node down to the effective depth is built, and the best
//! regularized value is computed bottom up: at each node either run the
//! default policy or take the best action and recurse. It is exponential in
//! the depth and exists as a reference for the anytime search.

use crate::belief::ParticleBelief;
use crate::bounds::{rollout_horizon, rollout_lower, DefaultPolicy};
use crate::error::SolverError;
use crate::pomdp::{next_random, Action, Obs, Particle, Pomdp, ScenarioSet};
use crate::tree::{node_weight, rho_value, PolicyNode, PolicyTree};

/// Default cap on the estimated number of tree nodes.
pub const DEFAULT_NODE_LIMIT: u128 = 10_000_000;

/// Depth beyond which a positive `lambda` makes expansion pointless:
/// `ceil(span / (lambda (1 - gamma))) + 1`, where `span` is the width of
/// the reward range. `None` when `lambda` is not positive.
pub fn truncation_depth(reward_span: f64, lambda: f64, discount: f64) -> Option<usize> {
    if !(lambda > 0.0) {
        return None;
    }
    let d = (reward_span / (lambda * (1.0 - discount))).ceil();
    Some(if d >= (usize::MAX / 2) as f64 { usize::MAX / 2 } else { d as usize + 1 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpConfig {
    pub max_depth: usize,
    pub lambda: f64,
    pub node_limit: u128,
}

impl DpConfig {
    pub fn new(max_depth: usize, lambda: f64) -> Self {
        DpConfig { max_depth, lambda, node_limit: DEFAULT_NODE_LIMIT }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpResult {
    /// Optimal regularized value of the root.
    pub value: f64,
    /// Weighted default-policy value of the root, `ell0(root)`.
    pub default_value: f64,
    /// `None` when running the default policy from the root is optimal.
    pub root_action: Option<Action>,
    pub policy: PolicyTree,
    /// Nodes visited.
    pub nodes: usize,
    /// Depth actually used.
    pub depth: usize,
}

/// Upper estimate of the node count: `sum_d |A|^d * min(K, |Z|^d)` over the
/// levels that get built.
pub fn estimate_nodes(num_actions: usize, num_obs: Option<usize>, k: usize, depth: usize) -> u128 {
    let a = num_actions as u128;
    let mut total: u128 = 0;
    let mut actions_pow: u128 = 1;
    let mut obs_pow: u128 = 1;
    for _ in 0..=depth + 1 {
        let width = obs_pow.min(k as u128);
        total = total.saturating_add(actions_pow.saturating_mul(width));
        actions_pow = actions_pow.saturating_mul(a);
        obs_pow = match num_obs {
            Some(z) => obs_pow.saturating_mul(z as u128),
            None => u128::MAX,
        };
    }
    total
}

struct Plan {
    action: Option<Action>,
    children: Vec<(Obs, Plan)>,
}

struct Solver<'a, M: Pomdp, P: ?Sized> {
    model: &'a M,
    policy: &'a P,
    k: usize,
    depth: usize,
    lambda: f64,
    seed: u64,
    nodes: usize,
}

impl<M: Pomdp, P: DefaultPolicy<M> + ?Sized> Solver<'_, M, P> {
    fn default_value(&self, particles: &[Particle<M::State>], depth: usize) -> f64 {
        let h = rollout_horizon(self.depth, depth);
        let l0 = rollout_lower(self.model, self.policy, particles, depth, h, self.seed);
        node_weight(particles.len(), self.k, depth, self.model.discount()) * l0
    }

    fn solve(&mut self, particles: &[Particle<M::State>], depth: usize) -> (f64, Plan) {
        self.nodes += 1;
        let mut best = self.default_value(particles, depth);
        let mut plan = Plan { action: None, children: Vec::new() };
        if depth > self.depth {
            return (best, plan);
        }
        let live: Vec<&Particle<M::State>> = particles.iter().filter(|p| !self.model.is_terminal(&p.state)).collect();
        if live.is_empty() {
            return (best, plan);
        }
        let discount = self.model.discount();
        for a in 0..self.model.num_actions() {
            let mut reward_sum = 0.0;
            let mut groups: Vec<(Obs, Vec<Particle<M::State>>)> = Vec::new();
            for p in &live {
                let out = self.model.step(&p.state, a, next_random(self.seed, p.scenario, depth + 1));
                reward_sum += out.reward;
                let child = Particle { scenario: p.scenario, state: out.next_state };
                match groups.iter_mut().find(|(z, _)| *z == out.observation) {
                    Some((_, g)) => g.push(child),
                    None => groups.push((out.observation, vec![child])),
                }
            }
            let mut value = rho_value(reward_sum, depth, self.k, discount, self.lambda);
            let mut children = Vec::with_capacity(groups.len());
            for (z, g) in groups {
                let (v, sub) = self.solve(&g, depth + 1);
                value += v;
                children.push((z, sub));
            }
            if value > best {
                best = value;
                plan = Plan { action: Some(a), children };
            }
        }
        (best, plan)
    }
}

fn flatten(plan: &Plan, depth: usize, out: &mut PolicyTree) -> usize {
    let slot = out.nodes.len();
    out.nodes.push(PolicyNode {
        id: slot,
        action: plan.action,
        depth,
        edges: Default::default(),
        default: plan.action.is_none(),
    });
    for (z, sub) in &plan.children {
        let c = flatten(sub, depth + 1, out);
        out.nodes[slot].edges.insert(*z, c);
    }
    slot
}

/// Solve the full tree built on `scenarios`. Uses depth
/// `min(D, truncation depth)` when `lambda > 0`.
pub fn solve_full<M, P>(
    scenarios: &ScenarioSet<M::State>,
    model: &M,
    policy: &P,
    cfg: &DpConfig,
) -> Result<DpResult, SolverError>
where
    M: Pomdp,
    P: DefaultPolicy<M> + ?Sized,
{
    if scenarios.is_empty() {
        return Err(SolverError::InvalidConfig("no scenarios".into()));
    }
    if !(cfg.lambda >= 0.0) {
        return Err(SolverError::InvalidConfig(format!("lambda = {} must be non-negative", cfg.lambda)));
    }
    let depth = crate::anytime::effective_depth(cfg.max_depth, cfg.lambda, model);
    let estimated = estimate_nodes(model.num_actions(), model.num_observations(), scenarios.len(), depth);
    if estimated > cfg.node_limit {
        return Err(SolverError::Capacity { estimated, limit: cfg.node_limit });
    }
    let mut solver = Solver {
        model,
        policy,
        k: scenarios.len(),
        depth,
        lambda: cfg.lambda,
        seed: scenarios.seed,
        nodes: 0,
    };
    let particles = scenarios.particles();
    let default_value = solver.default_value(&particles, 0);
    let (value, plan) = solver.solve(&particles, 0);
    let mut tree = PolicyTree::default();
    flatten(&plan, 0, &mut tree);
    Ok(DpResult { value, default_value, root_action: plan.action, policy: tree, nodes: solver.nodes, depth })
}

/// Sample `k` scenarios from the belief with `seed` and solve.
pub fn solve_full_belief<M, P>(
    belief: &ParticleBelief<M::State>,
    model: &M,
    policy: &P,
    k: usize,
    seed: u64,
    cfg: &DpConfig,
) -> Result<DpResult, SolverError>
where
    M: Pomdp,
    P: DefaultPolicy<M> + ?Sized,
{
    solve_full(&belief.sample_scenarios(k, seed), model, policy, cfg)
}
