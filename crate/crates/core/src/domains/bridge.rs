//! Bridge Crossing: an open-loop problem with no informative observations.
//!
//! Positions `0..=9`; the person starts at 0 but only knows it is 0 or 1.
//! Moving costs 1, except moving forward from 9, which crosses the bridge at
//! no cost. Calling for rescue at position `x` costs `x + 20`. Both crossing
//! and rescue end the episode. Motion is noiseless and there is a single null
//! observation.

use rand::RngCore;

use super::{Domain, DEFAULT_DISCOUNT};
use crate::pomdp::{Action, Obs, Pomdp, StepOutcome, Tabular, Transition};

pub const FORWARD: Action = 0;
pub const BACKWARD: Action = 1;
pub const RESCUE: Action = 2;

const LENGTH: u8 = 10;
const DONE: u8 = LENGTH;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BridgeState(pub u8);

impl BridgeState {
    pub const TERMINAL: BridgeState = BridgeState(DONE);

    pub fn position(self) -> Option<u8> {
        (self.0 < DONE).then_some(self.0)
    }
}

#[derive(Debug, Clone)]
pub struct BridgeModel {
    discount: f64,
}

impl Default for BridgeModel {
    fn default() -> Self {
        Self::new(DEFAULT_DISCOUNT)
    }
}

impl BridgeModel {
    pub fn new(discount: f64) -> Self {
        assert!((0.0..1.0).contains(&discount));
        BridgeModel { discount }
    }

    fn outcome(&self, s: BridgeState, a: Action) -> (BridgeState, f64) {
        let x = s.0;
        match a {
            FORWARD if x == LENGTH - 1 => (BridgeState::TERMINAL, 0.0),
            FORWARD => (BridgeState(x + 1), -1.0),
            BACKWARD => (BridgeState(x.saturating_sub(1)), -1.0),
            RESCUE => (BridgeState::TERMINAL, -f64::from(x) - 20.0),
            _ => panic!("invalid bridge action {a}"),
        }
    }
}

/// Optimal value of position `x` when the position is known:
/// `-(1 - gamma^(9 - x)) / (1 - gamma)`.
pub fn crossing_value(x: u8, discount: f64) -> f64 {
    -(1.0 - discount.powi(i32::from(LENGTH - 1 - x))) / (1.0 - discount)
}

impl Pomdp for BridgeModel {
    type State = BridgeState;

    fn num_actions(&self) -> usize {
        3
    }

    fn num_observations(&self) -> Option<usize> {
        Some(1)
    }

    fn state_space_size(&self) -> Option<usize> {
        Some(usize::from(LENGTH))
    }

    fn discount(&self) -> f64 {
        self.discount
    }

    fn max_reward(&self) -> f64 {
        0.0
    }

    fn min_reward(&self) -> f64 {
        -f64::from(LENGTH - 1) - 20.0
    }

    fn is_terminal(&self, s: &BridgeState) -> bool {
        s.0 >= DONE
    }

    fn step(&self, s: &BridgeState, a: Action, _phi: f64) -> StepOutcome<BridgeState> {
        debug_assert!(!self.is_terminal(s));
        let (next_state, reward) = self.outcome(*s, a);
        StepOutcome {
            next_state,
            observation: 0,
            reward,
        }
    }

    fn obs_prob(&self, _next: &BridgeState, _a: Action, z: Obs) -> f64 {
        if z == 0 {
            1.0
        } else {
            0.0
        }
    }

    fn action_name(&self, a: Action) -> String {
        match a {
            FORWARD => "forward",
            BACKWARD => "backward",
            RESCUE => "rescue",
            _ => "?",
        }
        .to_string()
    }
}

impl Tabular for BridgeModel {
    fn num_indexed_states(&self) -> usize {
        usize::from(LENGTH) + 1
    }

    fn state_index(&self, s: &BridgeState) -> usize {
        usize::from(s.0)
    }

    fn state_at(&self, index: usize) -> BridgeState {
        BridgeState(index as u8)
    }

    fn transitions(&self, s: &BridgeState, a: Action) -> Vec<Transition> {
        if self.is_terminal(s) {
            return vec![Transition {
                next: self.state_index(s),
                prob: 1.0,
                reward: 0.0,
            }];
        }
        let (next, reward) = self.outcome(*s, a);
        vec![Transition {
            next: self.state_index(&next),
            prob: 1.0,
            reward,
        }]
    }

    fn observations(&self) -> Vec<Obs> {
        vec![0]
    }
}

impl Domain for BridgeModel {
    fn name(&self) -> String {
        "bridge".into()
    }

    fn sample_world(&self, _rng: &mut dyn RngCore) -> BridgeState {
        BridgeState(0)
    }

    fn initial_distribution(&self, _world: &BridgeState) -> Vec<(BridgeState, f64)> {
        vec![(BridgeState(0), 0.5), (BridgeState(1), 0.5)]
    }

    fn default_policy_name(&self) -> String {
        "fixed:rescue".into()
    }

    fn domain_upper(&self, s: &BridgeState) -> Option<f64> {
        Some(match s.position() {
            Some(x) => crossing_value(x, self.discount),
            None => 0.0,
        })
    }
}
