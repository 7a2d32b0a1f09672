mod common;

use despot::anytime::{explore, AnytimeConfig, SearchStats};
use despot::bounds::{DefaultPolicy, FixedAction, HoUpper, UninformedUpper, UpperBound};
use despot::domains::adventurer::{AdventurerModel, STAY};
use despot::domains::bridge::{BridgeModel, RESCUE};
use despot::dp::{solve_full, DpConfig};
use despot::pomdp::{derive_seed, Pomdp, ScenarioSet};
use despot::tree::{DespotTree, NodeId, TreeParams, ROOT};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::MicroPomdp;

const TOL: f64 = 1e-9;

/// Optimal regularized value of the materialized tree below `b`, from
/// the stored default values only.
fn tree_value<S: Clone>(tree: &DespotTree<S>, b: NodeId) -> f64 {
    let n = &tree.nodes[b];
    if n.pruned || !n.is_expanded() {
        return n.ell0;
    }
    (0..n.branches.len())
        .map(|a| tree.rho(b, a) + n.branches[a].children.iter().map(|&(_, c)| tree_value(tree, c)).sum::<f64>())
        .fold(n.ell0, f64::max)
}

fn check_nodes<S: Clone>(tree: &DespotTree<S>, depth_cap: Option<usize>) {
    for (id, n) in tree.nodes.iter().enumerate() {
        assert!(n.ell <= n.mu + TOL, "node {id}: ell {} above mu {}", n.ell, n.mu);
        if !n.is_expanded() {
            continue;
        }
        if let Some(cap) = depth_cap {
            assert!(n.depth <= cap, "node {id} expanded at depth {} past {cap}", n.depth);
        }
        let live = n.branches[0].children.iter().map(|&(_, c)| tree.nodes[c].particles.len()).sum::<usize>();
        for branch in &n.branches {
            let count: usize = branch.children.iter().map(|&(_, c)| tree.nodes[c].particles.len()).sum();
            assert_eq!(count, live, "node {id}: children do not partition the scenarios");
        }
        assert!(live <= n.particles.len());
    }
}

/// Run `trials` trials one at a time and check every per-trial property:
/// the root gap never grows, each trial changes the tree, node invariants
/// hold, and the root lower bound is within the gap of the full-tree
/// optimum `optimum`.
fn trace<M, U, P>(
    model: &M,
    set: &ScenarioSet<M::State>,
    upper: &mut U,
    policy: &P,
    depth: usize,
    lambda: f64,
    trials: usize,
    optimum: f64,
) where
    M: Pomdp,
    U: UpperBound<M>,
    P: DefaultPolicy<M>,
{
    let cfg = AnytimeConfig {
        num_scenarios: set.len(),
        max_depth: depth,
        lambda,
        time_budget: None,
        check_invariants: true,
        ..AnytimeConfig::default()
    };
    upper.reset(set.seed);
    let params = TreeParams {
        num_scenarios: set.len(),
        max_depth: cfg.effective_depth(model),
        lambda,
        xi: cfg.xi,
        discount: model.discount(),
        seed: set.seed,
    };
    let cap = (lambda > 0.0).then(|| (model.reward_span() / (lambda * (1.0 - model.discount()))).ceil() as usize + 1);
    let mut tree = DespotTree::new(model, set.particles(), params, upper, policy);
    let mut stats = SearchStats::default();
    let mut gap = tree.root_gap();
    for trial in 0..trials {
        if tree.root_gap() <= 0.0 {
            break;
        }
        let before = (tree.len(), stats.prunes, stats.collapses, tree.root().mu, tree.root().ell);
        let leaf = explore(&mut tree, model, upper, policy, &cfg, trial, &mut stats);
        tree.backup_path(leaf);
        let after = (tree.len(), stats.prunes, stats.collapses, tree.root().mu, tree.root().ell);
        assert_ne!(before, after, "trial {trial} made no progress");
        assert!(tree.root_gap() <= gap + TOL, "gap grew from {gap} to {}", tree.root_gap());
        gap = tree.root_gap();
        assert!(
            tree.root().ell >= optimum - gap - TOL,
            "trial {trial}: ell {} below optimum {optimum} minus gap {gap}",
            tree.root().ell
        );
        assert!((tree_value(&tree, ROOT) - tree.root().ell).abs() <= TOL);
    }
    check_nodes(&tree, cap);
    assert_eq!(stats.lemma1_violations, 0);
}

fn bridge_set(k: usize, seed: u64) -> ScenarioSet<despot::domains::BridgeState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ScenarioSet::from_states(seed, (0..k).map(|_| despot::domains::BridgeState(rng.gen_range(0..2))).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bridge_search_properties(seed in any::<u64>(), k in 1usize..30, depth in 1usize..11, lambda_idx in 0usize..4, trials in 1usize..200) {
        let lambda = [0.0, 0.01, 0.1, 1.0][lambda_idx];
        let model = BridgeModel::default();
        let set = bridge_set(k, seed);
        let policy = FixedAction(RESCUE);
        let optimum = solve_full(&set, &model, &policy, &DpConfig::new(depth, lambda)).unwrap().value;
        trace(&model, &set, &mut UninformedUpper, &policy, depth, lambda, trials, optimum);
    }

    #[test]
    fn adventurer_search_properties(seed in any::<u64>(), k in 1usize..40, depth in 1usize..6, lambda_idx in 0usize..4, trials in 1usize..300) {
        let lambda = [0.0, 0.01, 0.1, 1.0][lambda_idx];
        let model = AdventurerModel::two_values();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = ScenarioSet::from_states(seed, (0..k).map(|_| model.start(rng.gen_range(0..2))).collect());
        let policy = FixedAction(STAY);
        let optimum = solve_full(&set, &model, &policy, &DpConfig::new(depth, lambda)).unwrap().value;
        let mut ho = HoUpper::uninformed(0, depth);
        trace(&model, &set, &mut ho, &policy, depth, lambda, trials, optimum);
    }

    #[test]
    fn micro_search_properties(seed in any::<u64>(), k in 1usize..20, depth in 1usize..4, lambda_idx in 0usize..3) {
        let lambda = [0.0, 0.01, 0.1][lambda_idx];
        let model = MicroPomdp::random(seed, 4, 2, 2, seed % 2 == 0);
        let live: Vec<usize> = model.initial().into_iter().map(|(s, _)| s).collect();
        let set = ScenarioSet::from_states(derive_seed(seed, 1), (0..k).map(|i| live[i % live.len()]).collect());
        let policy = FixedAction(1);
        let optimum = solve_full(&set, &model, &policy, &DpConfig::new(depth, lambda)).unwrap().value;
        let mut ho = HoUpper::uninformed(0, depth);
        trace(&model, &set, &mut ho, &policy, depth, lambda, 500, optimum);
    }

    #[test]
    fn dp_value_falls_with_penalty(seed in any::<u64>(), k in 1usize..40, depth in 1usize..6) {
        let model = AdventurerModel::two_values();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let set = ScenarioSet::from_states(seed, (0..k).map(|_| model.start(rng.gen_range(0..2))).collect());
        let policy = FixedAction(STAY);
        let mut last = f64::INFINITY;
        for lambda in [0.0, 0.01, 0.1, 1.0, 10.0] {
            let r = solve_full(&set, &model, &policy, &DpConfig::new(depth, lambda)).unwrap();
            prop_assert!(r.value <= last + TOL);
            prop_assert!(r.value >= r.default_value - TOL);
            // the returned policy, simulated on the same scenarios, earns its value
            let simulated = r.policy.evaluate(&model, &policy, &set.particles(), r.depth, set.seed);
            prop_assert!((simulated - lambda * r.policy.size() as f64 - r.value).abs() <= 1e-9 * (1.0 + r.value.abs()));
            last = r.value;
        }
    }
}
