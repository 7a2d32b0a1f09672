//! The model interface every planner component consumes.
//!
//! A POMDP is exposed through its *deterministic simulative model*: given a
//! state, an action and one uniform random number `phi`, [`Pomdp::step`]
//! returns the successor state, the observation and the reward. Drawing
//! `phi ~ U[0,1)` reproduces the transition and observation distributions, so
//! fixing the numbers in advance (a *scenario*) turns the stochastic model into
//! a deterministic one.
//!
//! Scenario randomness comes from a counter-based generator: the number used
//! at depth `t` of scenario `id` under master seed `seed` is a pure function
//! of `(seed, id, t)`. Streams are therefore lazy, reproducible and can be
//! split across workers without coordination. The generator is two rounds of
//! the SplitMix64 finalizer over the key, truncated to 53 bits; it is fixed for
//! this release and is not meant to be bit-compatible with other toolkits.

use std::fmt::Debug;
use std::hash::Hash;

use crate::error::ModelError;

/// Index of an action, `0..num_actions`.
pub type Action = usize;

/// Observation label. Domains choose their own encoding.
pub type Obs = u64;

/// Result of one application of the simulative model.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<S> {
    pub next_state: S,
    pub observation: Obs,
    pub reward: f64,
}

/// A discrete POMDP exposed through its deterministic simulative model.
///
/// Implementations must be pure: `step(s, a, phi)` returns the same outcome
/// for the same inputs. The reward is the realized reward of the transition,
/// so models whose reward depends on the sampled outcome (a stochastic
/// damage cost, say) fold that into `step`.
pub trait Pomdp: Send + Sync {
    type State: Clone + Eq + Hash + Debug + Send + Sync;

    fn num_actions(&self) -> usize;

    /// Number of distinct observations, when the domain can enumerate them.
    fn num_observations(&self) -> Option<usize> {
        None
    }

    /// Size of the state space as conventionally reported for the benchmark,
    /// or `None` for generative-only models.
    fn state_space_size(&self) -> Option<usize> {
        None
    }

    fn discount(&self) -> f64;

    /// Largest immediate reward over all state/action pairs.
    fn max_reward(&self) -> f64;

    /// Smallest immediate reward over all state/action pairs.
    fn min_reward(&self) -> f64;

    fn is_terminal(&self, s: &Self::State) -> bool;

    /// Deterministic simulative model. `s` must be non-terminal and `a` valid;
    /// use [`checked_step`] where inputs are not already trusted.
    fn step(&self, s: &Self::State, a: Action, phi: f64) -> StepOutcome<Self::State>;

    /// Probability of observing `z` after taking `a` and landing in `next`.
    fn obs_prob(&self, next: &Self::State, a: Action, z: Obs) -> f64;

    fn action_name(&self, a: Action) -> String {
        a.to_string()
    }

    /// Width of the reward range after shifting rewards to be non-negative:
    /// `R_max - min(R_min, 0)`.
    fn reward_span(&self) -> f64 {
        self.max_reward() - self.min_reward().min(0.0)
    }
}

/// Validating front door to [`Pomdp::step`].
pub fn checked_step<M: Pomdp>(
    model: &M,
    s: &M::State,
    a: Action,
    phi: f64,
) -> Result<StepOutcome<M::State>, ModelError> {
    if a >= model.num_actions() {
        return Err(ModelError::InvalidAction {
            action: a,
            num_actions: model.num_actions(),
        });
    }
    if model.is_terminal(s) {
        return Err(ModelError::TerminalState(format!("{s:?}")));
    }
    if !(0.0..1.0).contains(&phi) {
        return Err(ModelError::RandomOutOfRange(phi));
    }
    Ok(model.step(s, a, phi))
}

/// One entry of an explicit transition row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub next: usize,
    pub prob: f64,
    pub reward: f64,
}

/// Models with an enumerable state space and analytic transition rows.
///
/// Terminal states are absorbing: their row is a single self-loop with zero
/// reward. `transitions` must agree in distribution with `step`.
pub trait Tabular: Pomdp {
    /// Number of indexed states, terminal states included.
    fn num_indexed_states(&self) -> usize;

    fn state_index(&self, s: &Self::State) -> usize;

    fn state_at(&self, index: usize) -> Self::State;

    /// `T(s, a, .)` with the realized reward of each outcome.
    fn transitions(&self, s: &Self::State, a: Action) -> Vec<Transition>;

    /// The full observation set.
    fn observations(&self) -> Vec<Obs>;

    /// Expected immediate reward `R(s, a)`.
    fn expected_reward(&self, s: &Self::State, a: Action) -> f64 {
        self.transitions(s, a).iter().map(|t| t.prob * t.reward).sum()
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn to_unit(z: u64) -> f64 {
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Derive an independent 64-bit seed from `seed` for a labelled purpose.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    mix64(mix64(seed ^ label.wrapping_mul(0xD6E8_FEB8_6659_FD93)) ^ label)
}

/// The uniform number `phi_t` of scenario `scenario_id` under `seed`.
///
/// `t` counts from 1: the step taken from a node at depth `d` consumes
/// `phi_{d+1}`.
#[inline]
pub fn next_random(seed: u64, scenario_id: u32, t: usize) -> f64 {
    debug_assert!(t >= 1, "scenario depth index starts at 1");
    let a = mix64(seed ^ (u64::from(scenario_id)).wrapping_mul(0xA24B_AED4_963E_E407));
    to_unit(mix64(a ^ (t as u64).wrapping_mul(0x9FB2_1C65_1E98_DF25)))
}

/// Split one uniform number into several independent-looking ones.
///
/// `k = 0` returns `phi` unchanged; higher indices rehash its bits. Domains
/// that need more than one random choice per step use this so that a step
/// still consumes exactly one scenario number.
#[inline]
pub fn sub_uniform(phi: f64, k: u32) -> f64 {
    if k == 0 {
        return phi;
    }
    to_unit(mix64(phi.to_bits() ^ u64::from(k).wrapping_mul(GOLDEN)))
}

/// Pick an index from a discrete distribution by inverse CDF.
///
/// Falls back to the last index with positive mass when rounding leaves
/// `u` beyond the accumulated total.
pub fn sample_discrete(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

/// A scenario: a start state plus its lazily generated random stream.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioStream<S> {
    pub start_state: S,
    pub scenario_id: u32,
    pub seed: u64,
}

impl<S> ScenarioStream<S> {
    /// `phi_t`, for `t >= 1`.
    pub fn random(&self, t: usize) -> f64 {
        next_random(self.seed, self.scenario_id, t)
    }
}

/// The `K` scenarios a search is built from. All share one stream seed and
/// carry ids `0..K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet<S> {
    pub seed: u64,
    pub scenarios: Vec<ScenarioStream<S>>,
}

impl<S: Clone> ScenarioSet<S> {
    /// Build a set from explicit start states, ids assigned in order.
    pub fn from_states(seed: u64, states: Vec<S>) -> Self {
        let scenarios = states
            .into_iter()
            .enumerate()
            .map(|(i, s)| ScenarioStream {
                start_state: s,
                scenario_id: i as u32,
                seed,
            })
            .collect();
        ScenarioSet { seed, scenarios }
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    /// Start states paired with their scenario ids.
    pub fn particles(&self) -> Vec<Particle<S>> {
        self.scenarios
            .iter()
            .map(|sc| Particle {
                scenario: sc.scenario_id,
                state: sc.start_state.clone(),
            })
            .collect()
    }
}

/// A scenario's current state at some tree node.
#[derive(Debug, Clone, PartialEq)]
pub struct Particle<S> {
    pub scenario: u32,
    pub state: S,
}
