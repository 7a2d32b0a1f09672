//! Initial bounds for tree nodes.
//!
//! Upper bounds are per-particle values averaged over a node's scenarios;
//! particles that already reached a terminal state contribute 0. Lower
//! bounds come from rolling out a default policy on the node's scenarios.

mod mdp;
mod policy;
mod upper;

pub use mdp::{mdp_value_iteration, MdpSolution};
pub use policy::{rollout_lower, rollout_horizon, DefaultPolicy, FixedAction, ModeMdp, MAX_ROLLOUT};
pub use upper::{
    node_upper, uninformed_upper, DomainUpper, HoTerminal, HoUpper, MdpUpper, UninformedUpper, UpperBound,
};
