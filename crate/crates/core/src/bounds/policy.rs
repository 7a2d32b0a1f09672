//! Default policies and the rollout lower bound.

use std::collections::HashMap;
use std::sync::Arc;

use super::MdpSolution;
use crate::pomdp::{Action, Particle, Pomdp, Tabular};

/// Longest rollout ever simulated.
pub const MAX_ROLLOUT: usize = 90;

/// A scenario-based policy: picks an action from the set of particles at a
/// node (or, during a rollout, the particles still alive).
pub trait DefaultPolicy<M: Pomdp>: Send + Sync {
    /// `particles` is non-empty and holds only non-terminal states.
    fn action(&self, model: &M, particles: &[Particle<M::State>]) -> Action;

    fn name(&self) -> String;
}

/// The same action everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedAction(pub Action);

impl<M: Pomdp> DefaultPolicy<M> for FixedAction {
    fn action(&self, _model: &M, _particles: &[Particle<M::State>]) -> Action {
        self.0
    }

    fn name(&self) -> String {
        format!("fixed:{}", self.0)
    }
}

/// The MDP-greedy action at the most frequent particle state.
#[derive(Debug, Clone)]
pub struct ModeMdp {
    pub solution: Arc<MdpSolution>,
}

impl ModeMdp {
    pub fn new(solution: Arc<MdpSolution>) -> Self {
        ModeMdp { solution }
    }
}

/// Index of the most frequent state, lowest index on ties.
pub(crate) fn mode_index<M: Tabular>(model: &M, particles: &[Particle<M::State>]) -> usize {
    if let [single] = particles {
        return model.state_index(&single.state);
    }
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for p in particles {
        *counts.entry(model.state_index(&p.state)).or_default() += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .expect("mode of an empty particle set")
}

impl<M: Tabular> DefaultPolicy<M> for ModeMdp {
    fn action(&self, model: &M, particles: &[Particle<M::State>]) -> Action {
        self.solution.policy[mode_index(model, particles)]
    }

    fn name(&self) -> String {
        "mode-mdp".into()
    }
}

/// Rollout length for a node at `depth` in a search of depth `max_depth`.
pub fn rollout_horizon(max_depth: usize, depth: usize) -> usize {
    max_depth.saturating_sub(depth).min(MAX_ROLLOUT)
}

/// Average discounted return of `policy` over `particles`, simulated for at
/// most `horizon` steps from a node at `depth`.
///
/// The rollout is joint: at each step the policy sees every particle still
/// alive, picks one action, and all of them take it. Step `i` of the rollout
/// uses scenario number `depth + i + 1`. Terminal particles contribute 0;
/// the average is over all of `particles`. Returns values undiscounted by the
/// node's own depth.
pub fn rollout_lower<M: Pomdp, P: DefaultPolicy<M> + ?Sized>(
    model: &M,
    policy: &P,
    particles: &[Particle<M::State>],
    depth: usize,
    horizon: usize,
    seed: u64,
) -> f64 {
    if particles.is_empty() {
        return 0.0;
    }
    let discount = model.discount();
    let mut live: Vec<Particle<M::State>> =
        particles.iter().filter(|p| !model.is_terminal(&p.state)).cloned().collect();
    let mut total = 0.0;
    let mut weight = 1.0;
    for i in 0..horizon {
        if live.is_empty() {
            break;
        }
        let a = policy.action(model, &live);
        let t = depth + i + 1;
        let mut reward = 0.0;
        for p in &mut live {
            let phi = crate::pomdp::next_random(seed, p.scenario, t);
            let out = model.step(&p.state, a, phi);
            reward += out.reward;
            p.state = out.next_state;
        }
        total += weight * reward;
        weight *= discount;
        live.retain(|p| !model.is_terminal(&p.state));
    }
    total / particles.len() as f64
}
