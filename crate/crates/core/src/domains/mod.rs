//! Benchmark POMDPs.
//!
//! Every domain is tabular (its transition rows are written out analytically)
//! and additionally knows how to start an episode: how the true world state is
//! drawn and what the agent believes initially.

use rand::RngCore;

use crate::error::ModelError;
use crate::pomdp::{Action, Tabular};

pub mod adventurer;
pub mod bridge;
pub mod rocksample;
pub mod tag;

pub use adventurer::{AdventurerModel, AdventurerState};
pub use bridge::{BridgeModel, BridgeState};
pub use rocksample::{RockSampleModel, RockSampleState};
pub use tag::{TagModel, TagState};

/// Default discount for every benchmark configuration.
pub const DEFAULT_DISCOUNT: f64 = 0.95;

/// Episode set-up on top of the model.
pub trait Domain: Tabular {
    fn name(&self) -> String;

    /// Draw the true start state of an episode.
    fn sample_world(&self, rng: &mut dyn RngCore) -> Self::State;

    /// The agent's initial belief, which may depend on the parts of the true
    /// start state the agent observes directly (its own position, say).
    fn initial_distribution(&self, world: &Self::State) -> Vec<(Self::State, f64)>;

    /// Name of the default policy this domain ships with, in the syntax
    /// accepted by the harness (`fixed:<action>` or `mode-mdp`).
    fn default_policy_name(&self) -> String;

    /// Optional domain-specific per-state value bound, averaged over
    /// scenarios by the `domain` upper bound.
    fn domain_upper(&self, _s: &Self::State) -> Option<f64> {
        None
    }

    fn parse_action(&self, name: &str) -> Option<Action> {
        if let Ok(i) = name.parse::<usize>() {
            return (i < self.num_actions()).then_some(i);
        }
        (0..self.num_actions()).find(|&a| self.action_name(a) == name)
    }
}

/// Names accepted by [`DomainSpec::parse`].
pub const DOMAIN_NAMES: &[&str] = &[
    "tag",
    "rocksample-7-8",
    "rocksample-11-11",
    "bridge",
    "adventurer-2",
    "adventurer-50",
];

/// A domain selected by name, before construction.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Tag,
    RockSample { n: usize, k: usize, rock_seed: u64 },
    Bridge,
    Adventurer { values: Vec<f64> },
}

impl DomainSpec {
    /// Parse a registered domain name. `rocksample-N-K` accepts any size;
    /// the canonical 7-8 and 11-11 layouts are built in, others use a seeded
    /// layout.
    pub fn parse(name: &str) -> Option<DomainSpec> {
        match name {
            "tag" => Some(DomainSpec::Tag),
            "bridge" => Some(DomainSpec::Bridge),
            "adventurer-2" => Some(DomainSpec::Adventurer {
                values: vec![101.0, 150.0],
            }),
            "adventurer-50" => Some(DomainSpec::Adventurer {
                values: (101..=150).map(f64::from).collect(),
            }),
            _ => {
                let rest = name.strip_prefix("rocksample-")?;
                let (n, k) = rest.split_once('-')?;
                Some(DomainSpec::RockSample {
                    n: n.parse().ok()?,
                    k: k.parse().ok()?,
                    rock_seed: 0,
                })
            }
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> ModelError {
    ModelError::InvalidParameters(msg.into())
}
