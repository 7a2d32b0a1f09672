//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use despot::pomdp::{sample_discrete, sub_uniform, Action, Obs, Pomdp, StepOutcome, Tabular, Transition};
use despot::tree::{PolicyNode, PolicyTree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A small random POMDP with dense tables. The last state is terminal when
/// `with_terminal` is set.
#[derive(Debug, Clone)]
pub struct MicroPomdp {
    pub states: usize,
    pub actions: usize,
    pub observations: usize,
    /// `trans[s][a][s']`
    pub trans: Vec<Vec<Vec<f64>>>,
    /// `obs[s'][a][z]`
    pub obs: Vec<Vec<Vec<f64>>>,
    /// `reward[s][a]`, in `[-1, 1]`.
    pub reward: Vec<Vec<f64>>,
    pub terminal: Vec<bool>,
    pub discount: f64,
}

fn random_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    // sparse-ish rows make observation branches uneven
    let raw: Vec<f64> = (0..n).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen::<f64>() }).collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        let mut row = vec![0.0; n];
        row[rng.gen_range(0..n)] = 1.0;
        return row;
    }
    raw.into_iter().map(|x| x / total).collect()
}

impl MicroPomdp {
    pub fn random(seed: u64, states: usize, actions: usize, observations: usize, with_terminal: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let trans = (0..states)
            .map(|_| (0..actions).map(|_| random_row(&mut rng, states)).collect())
            .collect();
        let obs = (0..states)
            .map(|_| (0..actions).map(|_| random_row(&mut rng, observations)).collect())
            .collect();
        let reward = (0..states)
            .map(|_| (0..actions).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let mut terminal = vec![false; states];
        if with_terminal {
            terminal[states - 1] = true;
        }
        MicroPomdp { states, actions, observations, trans, obs, reward, terminal, discount: 0.9 }
    }

    /// Uniform over the non-terminal states.
    pub fn initial(&self) -> Vec<(usize, f64)> {
        let live: Vec<usize> = (0..self.states).filter(|&s| !self.terminal[s]).collect();
        live.iter().map(|&s| (s, 1.0 / live.len() as f64)).collect()
    }
}

impl Pomdp for MicroPomdp {
    type State = usize;

    fn num_actions(&self) -> usize {
        self.actions
    }

    fn num_observations(&self) -> Option<usize> {
        Some(self.observations)
    }

    fn discount(&self) -> f64 {
        self.discount
    }

    fn max_reward(&self) -> f64 {
        self.reward.iter().flatten().copied().fold(0.0, f64::max)
    }

    fn min_reward(&self) -> f64 {
        self.reward.iter().flatten().copied().fold(0.0, f64::min)
    }

    fn is_terminal(&self, s: &usize) -> bool {
        self.terminal[*s]
    }

    fn step(&self, s: &usize, a: Action, phi: f64) -> StepOutcome<usize> {
        let next = sample_discrete(&self.trans[*s][a], phi);
        let z = sample_discrete(&self.obs[next][a], sub_uniform(phi, 1));
        StepOutcome { next_state: next, observation: z as Obs, reward: self.reward[*s][a] }
    }

    fn obs_prob(&self, next: &usize, a: Action, z: Obs) -> f64 {
        self.obs[*next][a].get(z as usize).copied().unwrap_or(0.0)
    }
}

impl Tabular for MicroPomdp {
    fn num_indexed_states(&self) -> usize {
        self.states
    }

    fn state_index(&self, s: &usize) -> usize {
        *s
    }

    fn state_at(&self, index: usize) -> usize {
        index
    }

    fn transitions(&self, s: &usize, a: Action) -> Vec<Transition> {
        if self.terminal[*s] {
            return vec![Transition { next: *s, prob: 1.0, reward: 0.0 }];
        }
        self.trans[*s][a]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(next, &prob)| Transition { next, prob, reward: self.reward[*s][a] })
            .collect()
    }

    fn observations(&self) -> Vec<Obs> {
        (0..self.observations as Obs).collect()
    }
}

/// Every complete policy tree of `depth` levels over `actions` actions and
/// `observations` observations; each level branches on every observation.
pub fn all_policy_trees(depth: usize, actions: usize, observations: usize) -> Vec<PolicyTree> {
    fn build(depth: usize, level: usize, actions: usize, observations: usize) -> Vec<Vec<PolicyNode>> {
        if level == depth {
            return vec![Vec::new()];
        }
        let subtrees = build(depth, level + 1, actions, observations);
        // choose an action here and one subtree per observation
        let mut combos: Vec<Vec<Vec<PolicyNode>>> = vec![Vec::new()];
        if level + 1 < depth {
            for _ in 0..observations {
                combos = combos
                    .into_iter()
                    .flat_map(|c| {
                        subtrees.iter().map(move |t| {
                            let mut c = c.clone();
                            c.push(t.clone());
                            c
                        })
                    })
                    .collect();
            }
        }
        let mut out = Vec::new();
        for a in 0..actions {
            for children in &combos {
                let mut nodes =
                    vec![PolicyNode { id: 0, action: Some(a), depth: level, edges: Default::default(), default: false }];
                for (z, child) in children.iter().enumerate() {
                    let offset = nodes.len();
                    nodes[0].edges.insert(z as Obs, offset);
                    for n in child {
                        let mut n = n.clone();
                        n.id += offset;
                        for c in n.edges.values_mut() {
                            *c += offset;
                        }
                        nodes.push(n);
                    }
                }
                out.push(nodes);
            }
        }
        out
    }
    build(depth, 0, actions, observations).into_iter().map(|nodes| PolicyTree { nodes }).collect()
}
