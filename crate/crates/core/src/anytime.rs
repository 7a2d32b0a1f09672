//! Anytime forward search: repeated trials down the tree, each followed by a
//! backup, until the root gap closes or the budget runs out.

use std::time::{Duration, Instant};

use crate::belief::ParticleBelief;
use crate::bounds::{DefaultPolicy, UpperBound};
use crate::dp::truncation_depth;
use crate::error::SolverError;
use crate::pomdp::{Action, Pomdp, ScenarioSet};
use crate::tree::{argmax, DespotTree, NodeId, TreeParams, ROOT};

#[derive(Debug, Clone, PartialEq)]
pub struct AnytimeConfig {
    /// Scenarios sampled at the root (`K`).
    pub num_scenarios: usize,
    /// Search depth (`D`).
    pub max_depth: usize,
    /// Per-node regularization penalty.
    pub lambda: f64,
    /// Target fraction of the root gap each trial aims to leave behind.
    pub xi: f64,
    /// Stop once the root gap is at most this.
    pub eps0: f64,
    /// Wall-clock budget per search, checked between trials.
    pub time_budget: Option<Duration>,
    /// Maximum number of trials; deterministic alternative to the clock.
    pub trial_budget: Option<usize>,
    pub seed: u64,
    /// Count Lemma 1 checks during the search.
    pub check_invariants: bool,
}

impl Default for AnytimeConfig {
    fn default() -> Self {
        AnytimeConfig {
            num_scenarios: 500,
            max_depth: 90,
            lambda: 0.0,
            xi: 0.95,
            eps0: 0.0,
            time_budget: Some(Duration::from_millis(1000)),
            trial_budget: None,
            seed: 0,
            check_invariants: cfg!(debug_assertions),
        }
    }
}

impl AnytimeConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::InvalidConfig(m));
        if self.num_scenarios == 0 {
            return bad("K must be at least 1".into());
        }
        if self.max_depth == 0 {
            return bad("D must be at least 1".into());
        }
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return bad(format!("xi = {} outside (0, 1)", self.xi));
        }
        if !(self.lambda >= 0.0) {
            return bad(format!("lambda = {} must be non-negative", self.lambda));
        }
        if !(self.eps0 >= 0.0) {
            return bad(format!("eps0 = {} must be non-negative", self.eps0));
        }
        Ok(())
    }

    /// `D`, lowered to the truncation depth when `lambda > 0`.
    pub fn effective_depth<M: Pomdp>(&self, model: &M) -> usize {
        effective_depth(self.max_depth, self.lambda, model)
    }
}

/// `min(D, truncation depth)` for positive `lambda`, else `D`.
pub fn effective_depth<M: Pomdp>(max_depth: usize, lambda: f64, model: &M) -> usize {
    match truncation_depth(model.reward_span(), lambda, model.discount()) {
        Some(t) => max_depth.min(t),
        None => max_depth,
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchStats {
    pub trials: usize,
    pub expansions: usize,
    pub prunes: usize,
    /// Leaves past the depth limit collapsed to their default value.
    pub collapses: usize,
    pub nodes: usize,
    /// Root gap when the search stopped.
    pub final_gap: f64,
    pub elapsed: Duration,
    pub lemma1_checks: usize,
    pub lemma1_violations: usize,
    /// A trial changed nothing, so the search could make no more progress.
    pub stalled: bool,
}

/// Run trials on `scenarios` until the root gap is at most `eps0` or the
/// budget is used up.
pub fn build_despot_from_scenarios<M, U, P>(
    scenarios: &ScenarioSet<M::State>,
    model: &M,
    upper: &mut U,
    policy: &P,
    cfg: &AnytimeConfig,
) -> (DespotTree<M::State>, SearchStats)
where
    M: Pomdp,
    U: UpperBound<M> + ?Sized,
    P: DefaultPolicy<M> + ?Sized,
{
    let start = Instant::now();
    upper.reset(scenarios.seed);
    let params = TreeParams {
        num_scenarios: scenarios.len(),
        max_depth: cfg.effective_depth(model),
        lambda: cfg.lambda,
        xi: cfg.xi,
        discount: model.discount(),
        seed: scenarios.seed,
    };
    let mut tree = DespotTree::new(model, scenarios.particles(), params, upper, policy);
    let mut stats = SearchStats::default();
    loop {
        if tree.root_gap() <= cfg.eps0 {
            break;
        }
        if cfg.trial_budget.is_some_and(|b| stats.trials >= b) {
            break;
        }
        if cfg.time_budget.is_some_and(|b| start.elapsed() >= b) {
            break;
        }
        let before = (tree.root().mu, tree.root().ell, tree.len(), stats.prunes, stats.collapses);
        let leaf = explore(&mut tree, model, upper, policy, cfg, stats.trials, &mut stats);
        tree.backup_path(leaf);
        stats.trials += 1;
        let after = (tree.root().mu, tree.root().ell, tree.len(), stats.prunes, stats.collapses);
        if before == after {
            stats.stalled = true;
            break;
        }
    }
    stats.nodes = tree.len();
    stats.final_gap = tree.root_gap();
    stats.elapsed = start.elapsed();
    (tree, stats)
}

/// Sample `K` scenarios from the belief and search on them.
pub fn build_despot<M, U, P>(
    belief: &ParticleBelief<M::State>,
    model: &M,
    upper: &mut U,
    policy: &P,
    cfg: &AnytimeConfig,
) -> (DespotTree<M::State>, SearchStats)
where
    M: Pomdp,
    U: UpperBound<M> + ?Sized,
    P: DefaultPolicy<M> + ?Sized,
{
    let scenarios = belief.sample_scenarios(cfg.num_scenarios, cfg.seed);
    build_despot_from_scenarios(&scenarios, model, upper, policy, cfg)
}

/// One trial: follow the optimistic action and the child with the largest
/// excess uncertainty, expanding leaves on the way. Returns where the trial
/// ended.
pub fn explore<M, U, P>(
    tree: &mut DespotTree<M::State>,
    model: &M,
    upper: &mut U,
    policy: &P,
    cfg: &AnytimeConfig,
    trial: usize,
    stats: &mut SearchStats,
) -> NodeId
where
    M: Pomdp,
    U: UpperBound<M> + ?Sized,
    P: DefaultPolicy<M> + ?Sized,
{
    let max_depth = tree.params.max_depth;
    let root_gap = tree.root_gap();
    let mut b = ROOT;
    loop {
        if tree.nodes[b].depth > max_depth {
            break;
        }
        let excess = tree.excess_uncertainty(b, root_gap);
        if excess <= 0.0 {
            break;
        }
        if prune(tree, b, stats) {
            break;
        }
        if !tree.nodes[b].is_expanded() {
            let created = tree.expand(b, model, upper, policy, trial);
            if created == 0 {
                break;
            }
            stats.expansions += 1;
        }
        let actions = tree.nodes[b].branches.len();
        let (a_star, _) = argmax((0..actions).map(|a| tree.action_mu(b, a))).unwrap();
        let children = &tree.nodes[b].branches[a_star].children;
        let child_excess: Vec<f64> = children.iter().map(|&(_, c)| tree.excess_uncertainty(c, root_gap)).collect();
        if cfg.check_invariants && tree.nodes[b].expanded_in.is_some_and(|t| t < trial) {
            let total: f64 = child_excess.iter().sum();
            stats.lemma1_checks += 1;
            let scale = 1.0 + excess.abs() + total.abs();
            if excess > total + 1e-9 * scale {
                stats.lemma1_violations += 1;
            }
        }
        let (z_star, _) = argmax(child_excess.iter().copied()).unwrap();
        b = children[z_star].1;
    }
    if tree.nodes[b].depth > max_depth && !tree.nodes[b].pruned {
        tree.make_default(b);
        stats.collapses += 1;
    }
    b
}

/// Walk from `b` towards the root, collapsing every node some ancestor
/// blocks, until the first node that is not blocked.
pub fn prune<S: Clone>(tree: &mut DespotTree<S>, b: NodeId, stats: &mut SearchStats) -> bool {
    let mut any = false;
    let mut x = b;
    loop {
        if !tree.blocked_by_any(x) {
            break;
        }
        tree.make_default(x);
        tree.backup_path(x);
        stats.prunes += 1;
        any = true;
        match tree.nodes[x].parent {
            Some(p) => x = p,
            None => break,
        }
    }
    any
}

/// Action chosen by the search, falling back to the default policy.
pub fn root_action<M, P>(tree: &DespotTree<M::State>, model: &M, policy: &P) -> Action
where
    M: Pomdp,
    P: DefaultPolicy<M> + ?Sized,
{
    tree.extract_root_action(|| {
        let live: Vec<_> = tree.root().particles.iter().filter(|p| !model.is_terminal(&p.state)).cloned().collect();
        if live.is_empty() {
            0
        } else {
            policy.action(model, &live)
        }
    })
}

/// Build a tree from the belief and return the action to execute.
pub fn plan_step<M, U, P>(
    belief: &ParticleBelief<M::State>,
    model: &M,
    upper: &mut U,
    policy: &P,
    cfg: &AnytimeConfig,
) -> (Action, SearchStats)
where
    M: Pomdp,
    U: UpperBound<M> + ?Sized,
    P: DefaultPolicy<M> + ?Sized,
{
    let (tree, stats) = build_despot(belief, model, upper, policy, cfg);
    (root_action(&tree, model, policy), stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{FixedAction, UninformedUpper};
    use crate::domains::bridge::{BridgeModel, FORWARD, RESCUE};
    use crate::domains::BridgeState;

    fn bridge_scenarios(k: usize) -> ScenarioSet<BridgeState> {
        ScenarioSet::from_states(5, (0..k).map(|i| BridgeState((i % 2) as u8)).collect())
    }

    fn cfg() -> AnytimeConfig {
        AnytimeConfig {
            num_scenarios: 10,
            max_depth: 12,
            lambda: 0.1,
            time_budget: None,
            check_invariants: true,
            ..AnytimeConfig::default()
        }
    }

    #[test]
    fn zero_trials_leave_one_node() {
        let m = BridgeModel::default();
        let c = AnytimeConfig { trial_budget: Some(0), ..cfg() };
        let (tree, stats) = build_despot_from_scenarios(&bridge_scenarios(10), &m, &mut UninformedUpper, &FixedAction(RESCUE), &c);
        assert_eq!(tree.len(), 1);
        assert_eq!(stats.trials, 0);
        assert_eq!(root_action(&tree, &m, &FixedAction(RESCUE)), RESCUE);
    }

    #[test]
    fn large_eps0_skips_search() {
        let m = BridgeModel::default();
        let c = AnytimeConfig { eps0: 1e6, ..cfg() };
        let (tree, stats) = build_despot_from_scenarios(&bridge_scenarios(10), &m, &mut UninformedUpper, &FixedAction(RESCUE), &c);
        assert_eq!(stats.trials, 0);
        assert_eq!(tree.len(), 1);
    }

    #[test]
    fn bridge_converges_to_forward() {
        let m = BridgeModel::default();
        let (tree, stats) = build_despot_from_scenarios(&bridge_scenarios(10), &m, &mut UninformedUpper, &FixedAction(RESCUE), &cfg());
        assert_eq!(tree.root().mu, tree.root().ell);
        assert!(!stats.stalled);
        assert_eq!(root_action(&tree, &m, &FixedAction(RESCUE)), FORWARD);
        assert_eq!(stats.lemma1_violations, 0);
    }

    #[test]
    fn first_trial_expands_root() {
        let m = BridgeModel::default();
        let c = AnytimeConfig { trial_budget: Some(1), ..cfg() };
        let (tree, stats) = build_despot_from_scenarios(&bridge_scenarios(10), &m, &mut UninformedUpper, &FixedAction(RESCUE), &c);
        assert!(tree.root().is_expanded());
        assert!(stats.expansions >= 1);
        assert!(tree.nodes.iter().any(|n| n.depth >= 1));
    }

    #[test]
    fn zero_gap_root_is_pruned() {
        // every action ends the episode immediately from x = 9 under
        // forward, so with U = L0 at the root the root blocks itself
        let m = BridgeModel::default();
        let set = ScenarioSet::from_states(1, vec![BridgeState(9)]);
        let mut tree = DespotTree::new(
            &m,
            set.particles(),
            TreeParams { num_scenarios: 1, max_depth: 5, lambda: 0.1, xi: 0.95, discount: 0.95, seed: 1 },
            &mut UninformedUpper,
            &FixedAction(FORWARD),
        );
        assert_eq!(tree.root().upper, tree.root().lower0);
        let mut stats = SearchStats::default();
        assert!(prune(&mut tree, ROOT, &mut stats));
        assert!(tree.root().pruned);
    }

    #[test]
    fn no_pruning_without_penalty_and_gap() {
        let m = BridgeModel::default();
        let mut tree = DespotTree::new(
            &m,
            bridge_scenarios(4).particles(),
            TreeParams { num_scenarios: 4, max_depth: 5, lambda: 0.0, xi: 0.95, discount: 0.95, seed: 1 },
            &mut UninformedUpper,
            &FixedAction(RESCUE),
        );
        let before = tree.root().clone();
        let mut stats = SearchStats::default();
        assert!(!prune(&mut tree, ROOT, &mut stats));
        assert_eq!(tree.root(), &before);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(AnytimeConfig { xi: 1.0, ..cfg() }.validate().is_err());
        assert!(AnytimeConfig { num_scenarios: 0, ..cfg() }.validate().is_err());
        assert!(cfg().validate().is_ok());
    }

    #[test]
    fn collapsing_a_tied_leaf_is_progress() {
        // a leaf collapse under a tied action leaves the root untouched
        use crate::domains::adventurer::{AdventurerModel, STAY};
        let m = AdventurerModel::two_values();
        let states = (0..50).map(|i| m.start((i * 7 % 3 % 2) as u16)).collect();
        let set = ScenarioSet::from_states(3034523163212985628, states);
        let c = AnytimeConfig { num_scenarios: 50, max_depth: 6, ..cfg() };
        let (_, stats) = build_despot_from_scenarios(&set, &m, &mut UninformedUpper, &FixedAction(STAY), &c);
        assert!(!stats.stalled);
        assert_eq!(stats.final_gap, 0.0);
        assert!(stats.collapses > 0);
    }
}
