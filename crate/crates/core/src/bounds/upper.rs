//! Upper bounds on the value a scenario can still collect.

use std::collections::HashMap;
use std::sync::Arc;

use super::MdpSolution;
use crate::domains::Domain;
use crate::pomdp::{next_random, Particle, Pomdp, Tabular};

/// A per-particle upper bound. Takes `&mut self` so implementations can
/// memoize; one instance belongs to one search.
pub trait UpperBound<M: Pomdp>: Send {
    /// Bound on the discounted reward collected from `depth` onwards by a
    /// non-terminal particle, counted from `depth` (not discounted by it).
    fn particle_upper(&mut self, model: &M, particle: &Particle<M::State>, depth: usize) -> f64;

    fn name(&self) -> String;

    /// Called when a new search starts on scenarios with stream `seed`.
    fn reset(&mut self, _seed: u64) {}
}

/// `U0(b)`: the average of the particle bounds, with terminal particles
/// counting 0.
pub fn node_upper<M: Pomdp, U: UpperBound<M> + ?Sized>(
    bound: &mut U,
    model: &M,
    particles: &[Particle<M::State>],
    depth: usize,
) -> f64 {
    if particles.is_empty() {
        return 0.0;
    }
    let total: f64 = particles
        .iter()
        .filter(|p| !model.is_terminal(&p.state))
        .map(|p| bound.particle_upper(model, p, depth))
        .sum();
    total / particles.len() as f64
}

/// `R_max / (1 - gamma)`.
pub fn uninformed_upper<M: Pomdp>(model: &M) -> f64 {
    model.max_reward() / (1.0 - model.discount())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct UninformedUpper;

impl<M: Pomdp> UpperBound<M> for UninformedUpper {
    fn particle_upper(&mut self, model: &M, _particle: &Particle<M::State>, _depth: usize) -> f64 {
        uninformed_upper(model)
    }

    fn name(&self) -> String {
        "uninformed".into()
    }
}

/// Fully observable value `V_MDP` of the particle's state. An approximation
/// of the empirical value rather than a guaranteed bound.
#[derive(Debug, Clone)]
pub struct MdpUpper {
    pub solution: Arc<MdpSolution>,
}

impl<M: Tabular> UpperBound<M> for MdpUpper {
    fn particle_upper(&mut self, model: &M, particle: &Particle<M::State>, _depth: usize) -> f64 {
        self.solution.value(model, &particle.state)
    }

    fn name(&self) -> String {
        "mdp".into()
    }
}

/// The domain's own per-state bound, or the uninformed bound where it has
/// none.
#[derive(Debug, Clone, Copy, Default)]
pub struct DomainUpper;

impl<M: Domain> UpperBound<M> for DomainUpper {
    fn particle_upper(&mut self, model: &M, particle: &Particle<M::State>, _depth: usize) -> f64 {
        model
            .domain_upper(&particle.state)
            .unwrap_or_else(|| uninformed_upper(model))
    }

    fn name(&self) -> String {
        "domain".into()
    }
}

/// Value assigned at the last slice of the hindsight trellis.
pub type HoTerminal<M> = Arc<dyn Fn(&M, &<M as Pomdp>::State) -> f64 + Send + Sync>;

/// Hindsight optimization: with the scenario's random numbers known in
/// advance the problem is deterministic, and its optimal value bounds what
/// any policy can get on that scenario.
///
/// `u(t, s) = max_a r(s, a) + gamma * u(t + 1, s')` with `s'` from the
/// scenario's number at `t + 1`, down to slice `end` where `terminal`
/// applies. Results are memoized per `(scenario, t, state)`.
pub struct HoUpper<M: Pomdp> {
    seed: u64,
    end: usize,
    terminal: HoTerminal<M>,
    label: &'static str,
    memo: HashMap<(u32, usize, M::State), f64>,
}

impl<M: Pomdp> HoUpper<M> {
    /// Trellis ending at `end` with the uninformed bound there; admissible.
    pub fn uninformed(seed: u64, end: usize) -> Self {
        Self::with_terminal(seed, end, Arc::new(|m: &M, _s: &M::State| uninformed_upper(m)), "ho")
    }

    pub fn with_terminal(seed: u64, end: usize, terminal: HoTerminal<M>, label: &'static str) -> Self {
        HoUpper { seed, end, terminal, label, memo: HashMap::new() }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    fn value(&mut self, model: &M, scenario: u32, t: usize, s: &M::State) -> f64 {
        if model.is_terminal(s) {
            return 0.0;
        }
        if t >= self.end {
            return (self.terminal)(model, s);
        }
        let key = (scenario, t, s.clone());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let phi = next_random(self.seed, scenario, t + 1);
        let discount = model.discount();
        let mut best = f64::NEG_INFINITY;
        for a in 0..model.num_actions() {
            let out = model.step(s, a, phi);
            let q = out.reward + discount * self.value(model, scenario, t + 1, &out.next_state);
            best = best.max(q);
        }
        self.memo.insert(key, best);
        best
    }
}

impl<M: Tabular> HoUpper<M> {
    /// Trellis ending at `end` with `V_MDP` there.
    pub fn with_mdp(seed: u64, end: usize, solution: Arc<MdpSolution>) -> Self {
        Self::with_terminal(
            seed,
            end,
            Arc::new(move |m: &M, s: &M::State| solution.value(m, s)),
            "ho-mdp",
        )
    }
}

impl<M: Pomdp> UpperBound<M> for HoUpper<M> {
    fn particle_upper(&mut self, model: &M, particle: &Particle<M::State>, depth: usize) -> f64 {
        self.value(model, particle.scenario, depth, &particle.state)
    }

    fn name(&self) -> String {
        self.label.into()
    }

    fn reset(&mut self, seed: u64) {
        if seed != self.seed {
            self.seed = seed;
            self.memo.clear();
        }
    }
}
