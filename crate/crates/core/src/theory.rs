//! Generalization bounds for policies chosen on sampled scenarios.
//!
//! These are diagnostics: they report how far the empirical value of a
//! policy tree of a given size may be from its true value, and the penalty
//! per node that the bound implies. The solver's `lambda` is tuned freely.

use num_bigint::BigUint;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::belief::{exact_update, ExactBelief};
use crate::bounds::FixedAction;
use crate::error::{BeliefError, ModelError};
use crate::pomdp::{derive_seed, Action, ScenarioSet, Tabular};
use crate::tree::PolicyTree;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremParams {
    /// Failure probability, in (0, 1).
    pub tau: f64,
    /// Approximation constant, in (0, 1).
    pub alpha: f64,
    pub num_scenarios: usize,
    pub depth: usize,
    pub num_actions: usize,
    pub num_observations: usize,
    pub max_reward: f64,
    pub discount: f64,
}

impl TheoremParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::InvalidParameters(m));
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return bad(format!("tau = {} outside (0, 1)", self.tau));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha = {} outside (0, 1)", self.alpha));
        }
        if !(0.0..1.0).contains(&self.discount) {
            return bad(format!("discount = {} outside [0, 1)", self.discount));
        }
        if self.num_scenarios == 0 || self.depth == 0 || self.num_actions == 0 || self.num_observations == 0 {
            return bad("K, D, |A| and |Z| must be positive".into());
        }
        Ok(())
    }

    /// `R_max / ((1 + alpha)(1 - gamma))`.
    fn scale(&self) -> f64 {
        self.max_reward / ((1.0 + self.alpha) * (1.0 - self.discount))
    }

    /// `ln(K D |A| |Z|)`.
    fn log_branching(&self) -> f64 {
        (self.num_scenarios as f64 * self.depth as f64 * self.num_actions as f64 * self.num_observations as f64).ln()
    }
}

/// Gap allowed between the true value and the shrunk empirical value of
/// every policy tree of the given size, with probability `1 - tau`:
/// `scale * (ln(4 / tau) + size * ln(K D |A| |Z|)) / (alpha K)`.
pub fn theorem1_penalty(p: &TheoremParams, policy_size: usize) -> f64 {
    p.scale() * ((4.0 / p.tau).ln() + policy_size as f64 * p.log_branching()) / (p.alpha * p.num_scenarios as f64)
}

/// Objective whose maximizer carries a performance guarantee:
/// `(1 - alpha)/(1 + alpha) * value - scale * size * ln(K D |A| |Z|) / (alpha K)`.
pub fn regularized_score(empirical_value: f64, policy_size: usize, p: &TheoremParams) -> f64 {
    let shrink = (1.0 - p.alpha) / (1.0 + p.alpha);
    shrink * empirical_value - p.scale() * policy_size as f64 * p.log_branching() / (p.alpha * p.num_scenarios as f64)
}

/// The per-node penalty for which `value - lambda * size` is proportional
/// to [`regularized_score`].
pub fn induced_lambda(p: &TheoremParams) -> f64 {
    let shrink = (1.0 - p.alpha) / (1.0 + p.alpha);
    p.scale() * p.log_branching() / (p.alpha * p.num_scenarios as f64) / shrink
}

/// Upper bound on the number of policy trees with `size` nodes:
/// `size^(size - 2) * (|A| |Z|)^size`.
pub fn policy_count_bound(size: usize, num_actions: usize, num_observations: usize) -> BigUint {
    assert!(size >= 1, "policy trees have at least one node");
    let trees = if size >= 2 {
        BigUint::from(size).pow((size - 2) as u32)
    } else {
        BigUint::from(1u32)
    };
    trees * BigUint::from(num_actions * num_observations).pow(size as u32)
}

/// Values of the default policy "always take `action`" on every state,
/// by iterative policy evaluation.
pub fn fixed_action_values<M: Tabular>(model: &M, action: Action, tol: f64) -> Vec<f64> {
    let n = model.num_indexed_states();
    let rows: Vec<_> = (0..n)
        .map(|i| {
            let s = model.state_at(i);
            if model.is_terminal(&s) {
                Vec::new()
            } else {
                model.transitions(&s, action)
            }
        })
        .collect();
    let mut v = vec![0.0; n];
    loop {
        let mut delta: f64 = 0.0;
        for (i, row) in rows.iter().enumerate() {
            let new: f64 = row.iter().map(|t| t.prob * (t.reward + model.discount() * v[t.next])).sum();
            delta = delta.max((new - v[i]).abs());
            v[i] = new;
        }
        if delta <= tol {
            return v;
        }
    }
}

/// True value of a policy tree from an exact belief, with `default_values`
/// (per-state values of the default policy) below default nodes and
/// unsampled observations. The default policy must not depend on the
/// belief, as with a fixed action.
pub fn exact_policy_value<M: Tabular>(
    model: &M,
    belief: &ExactBelief,
    tree: &PolicyTree,
    default_values: &[f64],
) -> f64 {
    fn rec<M: Tabular>(model: &M, b: &ExactBelief, tree: &PolicyTree, slot: Option<usize>, dv: &[f64]) -> f64 {
        let action = slot.and_then(|i| tree.nodes[i].action);
        let Some(a) = action else {
            return b.probs.iter().zip(dv).map(|(p, v)| p * v).sum();
        };
        let node = &tree.nodes[slot.unwrap()];
        let mut value = 0.0;
        for (i, &p) in b.probs.iter().enumerate() {
            if p > 0.0 {
                let s = model.state_at(i);
                if !model.is_terminal(&s) {
                    value += p * model.expected_reward(&s, a);
                }
            }
        }
        for z in model.observations() {
            let pz = b.observation_likelihood(model, a, z);
            if pz <= 0.0 {
                continue;
            }
            let next = exact_update(b, a, z, model).expect("positive likelihood");
            value += model.discount() * pz * rec(model, &next, tree, node.edges.get(&z).copied(), dv);
        }
        value
    }
    rec(model, belief, tree, Some(0), default_values)
}

/// Outcome of [`empirical_coverage`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub resamples: usize,
    /// Resamples on which the true value fell below the bound.
    pub violations: usize,
    /// `tau + 3 sqrt(tau (1 - tau) / resamples)`.
    pub allowed_fraction: f64,
    /// Exact value of the policy from the initial belief (unshifted).
    pub true_value: f64,
    pub penalty: f64,
}

impl CoverageReport {
    pub fn violation_fraction(&self) -> f64 {
        self.violations as f64 / self.resamples as f64
    }

    pub fn passes(&self) -> bool {
        self.violation_fraction() <= self.allowed_fraction
    }
}

/// Check the size-`|tree|` bound empirically. Each resample draws
/// `params.num_scenarios` scenarios i.i.d. from `initial`, evaluates the
/// policy on them, and counts a violation when
/// `V < (1 - alpha)/(1 + alpha) * V_hat - penalty`.
///
/// The bound assumes rewards in `[0, R]`, so both values are shifted by
/// `-min(R_min, 0)` per step; `params.max_reward` should be the model's
/// reward span. Empirical returns cover `params.depth` steps, the exact value
/// an infinite horizon. Below the tree the policy takes `default_action`.
pub fn empirical_coverage<M: Tabular>(
    model: &M,
    initial: &[(M::State, f64)],
    tree: &PolicyTree,
    default_action: Action,
    params: &TheoremParams,
    resamples: usize,
    seed: u64,
) -> Result<CoverageReport, BeliefError> {
    let g = model.discount();
    let shift = -model.min_reward().min(0.0);
    let default_values = fixed_action_values(model, default_action, 1e-12);
    let exact = ExactBelief::from_distribution(model, initial)?;
    let true_value = exact_policy_value(model, &exact, tree, &default_values);
    let shifted_true = true_value + shift / (1.0 - g);
    let horizon_shift = shift * (1.0 - g.powi(params.depth as i32)) / (1.0 - g);

    let penalty = theorem1_penalty(params, tree.size());
    let shrink = (1.0 - params.alpha) / (1.0 + params.alpha);
    let weights = WeightedIndex::new(initial.iter().map(|(_, w)| *w)).map_err(|_| BeliefError::Empty)?;
    let policy = FixedAction(default_action);
    let mut violations = 0;
    for r in 0..resamples {
        let stream = derive_seed(seed, r as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(stream);
        let states = (0..params.num_scenarios).map(|_| initial[weights.sample(&mut rng)].0.clone()).collect();
        let set = ScenarioSet::from_states(stream, states);
        let empirical = tree.evaluate(model, &policy, &set.particles(), params.depth, stream) + horizon_shift;
        if shifted_true < shrink * empirical - penalty {
            violations += 1;
        }
    }
    let tau = params.tau;
    Ok(CoverageReport {
        resamples,
        violations,
        allowed_fraction: tau + 3.0 * (tau * (1.0 - tau) / resamples as f64).sqrt(),
        true_value,
        penalty,
    })
}
