//! Online POMDP planning with determinized sparse partially observable
//! trees.
//!
//! A search samples `K` scenarios from the current belief, each a start
//! state plus a fixed stream of random numbers, and builds the belief tree
//! those scenarios reach. [`anytime::plan_step`] grows that tree trial by
//! trial under upper and lower bounds; [`dp::solve_full`] solves the whole
//! tree exactly and serves as a reference. Both trade value against tree
//! size through a per-node penalty `lambda`.
//!
//! ```
//! use despot::anytime::{plan_step, AnytimeConfig};
//! use despot::belief::ParticleBelief;
//! use despot::bounds::{FixedAction, UninformedUpper};
//! use despot::domains::{bridge, BridgeModel, Domain};
//!
//! let model = BridgeModel::default();
//! let start = model.initial_distribution(&bridge::BridgeState(0));
//! let belief = ParticleBelief::from_distribution(&start, 100, 1).unwrap();
//! let cfg = AnytimeConfig {
//!     num_scenarios: 50,
//!     max_depth: 20,
//!     time_budget: None,
//!     trial_budget: Some(100),
//!     ..AnytimeConfig::default()
//! };
//! let (action, _stats) = plan_step(&belief, &model, &mut UninformedUpper, &FixedAction(bridge::RESCUE), &cfg);
//! assert_eq!(action, bridge::FORWARD);
//! ```

pub mod anytime;
pub mod belief;
pub mod bounds;
pub mod cli;
pub mod domains;
pub mod dp;
pub mod error;
pub mod harness;
pub mod pomdp;
pub mod theory;
pub mod tree;

pub use error::{BeliefError, HarnessError, ModelError, SolverError};
pub use pomdp::{Action, Obs, Particle, Pomdp, ScenarioSet, StepOutcome, Tabular};
