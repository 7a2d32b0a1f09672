mod common;

use std::collections::HashMap;

use despot::domains::adventurer::AdventurerModel;
use despot::domains::bridge::BridgeModel;
use despot::domains::rocksample::RockSampleModel;
use despot::domains::tag::TagModel;
use despot::domains::Domain;
use despot::pomdp::{next_random, Action, Obs, Pomdp, ScenarioStream, Tabular};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::MicroPomdp;

type Trajectory<S> = Vec<(S, Obs, f64)>;

/// Walk `actions` from a start drawn with `seed` under one scenario stream.
fn replay<M: Domain>(model: &M, seed: u64, actions: &[usize]) -> Trajectory<M::State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = model.sample_world(&mut rng);
    let stream = ScenarioStream { start_state: (), scenario_id: 0, seed };
    let mut out = Vec::new();
    for (t, &a) in actions.iter().enumerate() {
        if model.is_terminal(&s) {
            break;
        }
        let step = model.step(&s, a % model.num_actions(), stream.random(t + 1));
        assert!(step.reward <= model.max_reward() && step.reward >= model.min_reward());
        s = step.next_state.clone();
        out.push((step.next_state, step.observation, step.reward));
    }
    out
}

fn assert_replays<M: Domain>(model: &M, seed: u64, actions: &[usize]) {
    assert_eq!(replay(model, seed, actions), replay(model, seed, actions));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replays_are_identical(seed in any::<u64>(), actions in prop::collection::vec(0usize..16, 0..40)) {
        assert_replays(&BridgeModel::default(), seed, &actions);
        assert_replays(&AdventurerModel::two_values(), seed, &actions);
        assert_replays(&AdventurerModel::fifty_values(), seed, &actions);
        assert_replays(&TagModel::default(), seed, &actions);
        assert_replays(&RockSampleModel::new(5, 3, 1).unwrap(), seed, &actions);
    }

    #[test]
    fn micro_rows_are_distributions(seed in any::<u64>(), s in 2usize..7, a in 1usize..4, z in 1usize..4, terminal: bool) {
        let m = MicroPomdp::random(seed, s, a, z, terminal);
        for i in 0..m.num_indexed_states() {
            for action in 0..m.num_actions() {
                let obs: f64 = m.observations().iter().map(|&o| m.obs_prob(&i, action, o)).sum();
                prop_assert!((obs - 1.0).abs() < 1e-9);
                let trans: f64 = m.transitions(&i, action).iter().map(|t| t.prob).sum();
                prop_assert!((trans - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn observation_rows_sum_to_one_on_benchmarks() {
    fn check<M: Tabular>(m: &M) {
        let zs = m.observations();
        for i in 0..m.num_indexed_states() {
            let s = m.state_at(i);
            for a in 0..m.num_actions() {
                let total: f64 = zs.iter().map(|&z| m.obs_prob(&s, a, z)).sum();
                assert!((total - 1.0).abs() < 1e-9, "{s:?} {a}: {total}");
            }
        }
    }
    check(&BridgeModel::default());
    check(&AdventurerModel::two_values());
    check(&AdventurerModel::fifty_values());
    check(&TagModel::default());
    check(&RockSampleModel::new(4, 3, 2).unwrap());
}

/// `(s', z)` frequencies over `draws` uniform numbers against `T * O`,
/// within three standard errors per outcome.
fn check_step_frequencies(m: &MicroPomdp, s: usize, a: Action, draws: u32) {
    let mut counts: HashMap<(usize, Obs), u32> = HashMap::new();
    for i in 0..draws {
        let out = m.step(&s, a, next_random(0xF00D, i, 1));
        *counts.entry((out.next_state, out.observation)).or_default() += 1;
    }
    let n = f64::from(draws);
    for next in 0..m.states {
        for z in 0..m.observations {
            let p = m.trans[s][a][next] * m.obs[next][a][z];
            let freq = f64::from(counts.get(&(next, z as Obs)).copied().unwrap_or(0)) / n;
            let se = (p * (1.0 - p) / n).sqrt().max(1.0 / n);
            assert!((freq - p).abs() <= 3.0 * se, "s={s} a={a} -> ({next}, {z}): {freq} vs {p}");
        }
    }
}

#[test]
fn micro_step_frequencies_match_tables() {
    for (seed, shape) in [(1, (3, 2, 2)), (2, (5, 3, 3)), (3, (6, 2, 3))] {
        let m = MicroPomdp::random(seed, shape.0, shape.1, shape.2, false);
        for s in 0..m.states {
            for a in 0..m.actions {
                check_step_frequencies(&m, s, a, 100_000);
            }
        }
    }
}

#[test]
fn streams_do_not_depend_on_query_order() {
    let stream = ScenarioStream { start_state: (), scenario_id: 7, seed: 42 };
    let forward: Vec<f64> = (1..50).map(|t| stream.random(t)).collect();
    let backward: Vec<f64> = (1..50).rev().map(|t| stream.random(t)).collect();
    assert!(forward.iter().eq(backward.iter().rev()));
    assert!(forward.iter().all(|&u| (0.0..1.0).contains(&u)));
}
