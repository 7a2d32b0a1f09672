//! Belief tracking between real execution steps.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::BeliefError;
use crate::pomdp::{Action, Obs, Pomdp, ScenarioSet, Tabular};

/// A distribution over the indexed states of a tabular model.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactBelief {
    pub probs: Vec<f64>,
}

impl ExactBelief {
    pub fn from_distribution<M: Tabular>(model: &M, dist: &[(M::State, f64)]) -> Result<Self, BeliefError> {
        let mut probs = vec![0.0; model.num_indexed_states()];
        for (s, p) in dist {
            probs[model.state_index(s)] += p;
        }
        let total: f64 = probs.iter().sum();
        if !(total > 0.0) {
            return Err(BeliefError::Empty);
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(ExactBelief { probs })
    }

    pub fn prob<M: Tabular>(&self, model: &M, s: &M::State) -> f64 {
        self.probs[model.state_index(s)]
    }

    /// Predicted distribution after `a`, before observing.
    pub fn predict<M: Tabular>(&self, model: &M, a: Action) -> Vec<f64> {
        let mut next = vec![0.0; self.probs.len()];
        for (i, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for t in model.transitions(&model.state_at(i), a) {
                next[t.next] += p * t.prob;
            }
        }
        next
    }

    /// `P(z | b, a)`.
    pub fn observation_likelihood<M: Tabular>(&self, model: &M, a: Action, z: Obs) -> f64 {
        self.predict(model, a)
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| p * model.obs_prob(&model.state_at(i), a, z))
            .sum()
    }

    /// Probability mass on terminal states.
    pub fn terminal_mass<M: Tabular>(&self, model: &M) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(i, _)| model.is_terminal(&model.state_at(*i)))
            .map(|(_, p)| p)
            .sum()
    }
}

/// Bayes' rule: `b'(s') = eta * O(s', a, z) * sum_s T(s, a, s') b(s)`.
/// Terminal states are absorbing.
pub fn exact_update<M: Tabular>(b: &ExactBelief, a: Action, z: Obs, model: &M) -> Result<ExactBelief, BeliefError> {
    let mut next = b.predict(model, a);
    for (i, p) in next.iter_mut().enumerate() {
        if *p > 0.0 {
            *p *= model.obs_prob(&model.state_at(i), a, z);
        }
    }
    let likelihood: f64 = next.iter().sum();
    if !(likelihood > 0.0) {
        return Err(BeliefError::ImpossibleObservation { likelihood });
    }
    let eta = 1.0 / likelihood;
    next.iter_mut().for_each(|p| *p *= eta);
    Ok(ExactBelief { probs: next })
}

/// Weighted particle set updated by sequential importance resampling.
#[derive(Debug, Clone)]
pub struct ParticleBelief<S> {
    pub particles: Vec<(S, f64)>,
    pub num_particles: usize,
    pub rng_seed: u64,
    rng: ChaCha8Rng,
}

/// Systematic resampling: `n` equally spaced pointers with one random
/// offset. Returns the chosen indices in order.
fn systematic_indices(weights: &[f64], n: usize, u: f64) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let step = total / n as f64;
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut j = 0;
    for i in 0..n {
        let pointer = (u + i as f64) * step;
        while j + 1 < weights.len() && acc + weights[j] <= pointer {
            acc += weights[j];
            j += 1;
        }
        // skip zero-weight entries rounding may land on
        while weights[j] == 0.0 && j + 1 < weights.len() {
            acc += weights[j];
            j += 1;
        }
        let mut k = j;
        while weights[k] == 0.0 && k > 0 {
            k -= 1;
        }
        out.push(k);
    }
    out
}

impl<S: Clone> ParticleBelief<S> {
    /// `n` particles drawn from `dist` by systematic sampling.
    pub fn from_distribution(dist: &[(S, f64)], n: usize, rng_seed: u64) -> Result<Self, BeliefError> {
        if dist.is_empty() || n == 0 {
            return Err(BeliefError::Empty);
        }
        let weights: Vec<f64> = dist.iter().map(|(_, w)| *w).collect();
        if !(weights.iter().sum::<f64>() > 0.0) {
            return Err(BeliefError::Empty);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let idx = systematic_indices(&weights, n, rng.gen());
        let w = 1.0 / n as f64;
        Ok(ParticleBelief {
            particles: idx.into_iter().map(|i| (dist[i].0.clone(), w)).collect(),
            num_particles: n,
            rng_seed,
            rng,
        })
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    fn resample(&mut self, states: Vec<S>, weights: &[f64]) -> Result<(), BeliefError> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(BeliefError::ParticleDepletion { particles: weights.len() });
        }
        let idx = systematic_indices(weights, self.num_particles, self.rng.gen());
        let w = 1.0 / self.num_particles as f64;
        self.particles = idx.into_iter().map(|i| (states[i].clone(), w)).collect();
        Ok(())
    }

    /// Propagate each particle through the model with a fresh random number,
    /// weight it by `O(s', a, z)` and resample. Particles already terminal
    /// stay where they are.
    pub fn sir_update<M: Pomdp<State = S>>(&self, a: Action, z: Obs, model: &M) -> Result<Self, BeliefError> {
        let mut next = self.clone();
        let mut states = Vec::with_capacity(self.particles.len());
        let mut weights = Vec::with_capacity(self.particles.len());
        for (s, w) in &self.particles {
            let s2 = if model.is_terminal(s) {
                s.clone()
            } else {
                model.step(s, a, next.rng.gen()).next_state
            };
            weights.push(w * model.obs_prob(&s2, a, z));
            states.push(s2);
        }
        next.resample(states, &weights)?;
        Ok(next)
    }

    /// Drop terminal particles, for when the real world is known to be
    /// still running.
    pub fn condition_alive<M: Pomdp<State = S>>(&mut self, model: &M) -> Result<(), BeliefError> {
        if self.particles.iter().all(|(s, _)| !model.is_terminal(s)) {
            return Ok(());
        }
        let (states, weights): (Vec<S>, Vec<f64>) = self
            .particles
            .iter()
            .map(|(s, w)| (s.clone(), if model.is_terminal(s) { 0.0 } else { *w }))
            .unzip();
        self.resample(states, &weights)
    }

    /// `k` scenarios with start states drawn i.i.d. from the belief; the
    /// streams use `seed` and carry ids `0..k`.
    pub fn sample_scenarios(&self, k: usize, seed: u64) -> ScenarioSet<S> {
        let weights = WeightedIndex::new(self.particles.iter().map(|(_, w)| *w)).expect("belief has positive weight");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let states = (0..k).map(|_| self.particles[weights.sample(&mut rng)].0.clone()).collect();
        ScenarioSet::from_states(seed, states)
    }

    /// Weight per indexed state.
    pub fn histogram<M: Tabular<State = S>>(&self, model: &M) -> Vec<f64> {
        let mut h = vec![0.0; model.num_indexed_states()];
        for (s, w) in &self.particles {
            h[model.state_index(s)] += w;
        }
        h
    }
}

/// Total variation distance between two distributions on the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
