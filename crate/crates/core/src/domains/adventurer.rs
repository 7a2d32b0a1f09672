//! Adventurer: a small domain whose observation count is a free parameter.
//!
//! A 1x5 corridor, start in cell 0, treasure in cell 4 with a value drawn
//! uniformly from a finite set. Driving left or right risks damage with
//! probability 0.5 (cost 10, episode over). Staying in cell 4 digs up the
//! treasure (reward = its value, episode over); staying anywhere else is free.
//! Each step the sensor reports the treasure value: correct with probability
//! 0.7, otherwise uniform over the remaining values.
//!
//! Within one step the damage draw uses the scenario number directly and the
//! sensor draw uses an independent sub-draw.

use rand::RngCore;

use super::{invalid, Domain, DEFAULT_DISCOUNT};
use crate::error::ModelError;
use crate::pomdp::{sub_uniform, Action, Obs, Pomdp, StepOutcome, Tabular, Transition};

pub const LEFT: Action = 0;
pub const RIGHT: Action = 1;
pub const STAY: Action = 2;

pub const CORRIDOR: u8 = 5;
pub const SENSOR_ACCURACY: f64 = 0.7;
pub const DAMAGE_PROB: f64 = 0.5;
pub const DAMAGE_COST: f64 = -10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Alive,
    Damaged,
    Dug,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdventurerState {
    pub pos: u8,
    /// Index into the model's value set.
    pub value: u16,
    pub status: Status,
}

#[derive(Debug, Clone)]
pub struct AdventurerModel {
    values: Vec<f64>,
    discount: f64,
}

impl AdventurerModel {
    pub fn new(values: Vec<f64>, discount: f64) -> Result<Self, ModelError> {
        if values.is_empty() {
            return Err(invalid("adventurer needs at least one treasure value"));
        }
        if !(0.0..1.0).contains(&discount) {
            return Err(invalid(format!("discount {discount} outside [0, 1)")));
        }
        Ok(AdventurerModel { values, discount })
    }

    /// `X = {101, 150}`.
    pub fn two_values() -> Self {
        Self::new(vec![101.0, 150.0], DEFAULT_DISCOUNT).unwrap()
    }

    /// `X = {101, ..., 150}`.
    pub fn fifty_values() -> Self {
        Self::new((101..=150).map(f64::from).collect(), DEFAULT_DISCOUNT).unwrap()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn start(&self, value: u16) -> AdventurerState {
        AdventurerState {
            pos: 0,
            value,
            status: Status::Alive,
        }
    }

    fn noise_prob(&self) -> f64 {
        let n = self.values.len();
        if n == 1 {
            0.0
        } else {
            (1.0 - SENSOR_ACCURACY) / (n - 1) as f64
        }
    }

    fn reading(&self, value: u16, u: f64) -> Obs {
        let n = self.values.len();
        if n == 1 || u < SENSOR_ACCURACY {
            return Obs::from(value);
        }
        let slot = (((u - SENSOR_ACCURACY) / (1.0 - SENSOR_ACCURACY)) * (n - 1) as f64) as usize;
        let slot = slot.min(n - 2);
        // skip the true value
        let z = if slot >= usize::from(value) { slot + 1 } else { slot };
        z as Obs
    }

    fn moved(s: AdventurerState, a: Action) -> AdventurerState {
        let pos = match a {
            LEFT => s.pos.saturating_sub(1),
            _ => (s.pos + 1).min(CORRIDOR - 1),
        };
        AdventurerState { pos, ..s }
    }
}

impl Pomdp for AdventurerModel {
    type State = AdventurerState;

    fn num_actions(&self) -> usize {
        3
    }

    fn num_observations(&self) -> Option<usize> {
        Some(self.values.len())
    }

    fn state_space_size(&self) -> Option<usize> {
        Some(self.num_indexed_states())
    }

    fn discount(&self) -> f64 {
        self.discount
    }

    fn max_reward(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    fn min_reward(&self) -> f64 {
        DAMAGE_COST.min(self.values.iter().copied().fold(0.0, f64::min))
    }

    fn is_terminal(&self, s: &AdventurerState) -> bool {
        s.status != Status::Alive
    }

    fn step(&self, s: &AdventurerState, a: Action, phi: f64) -> StepOutcome<AdventurerState> {
        debug_assert!(!self.is_terminal(s));
        let (next_state, reward) = match a {
            STAY if s.pos == CORRIDOR - 1 => (
                AdventurerState {
                    status: Status::Dug,
                    ..*s
                },
                self.values[usize::from(s.value)],
            ),
            STAY => (*s, 0.0),
            LEFT | RIGHT => {
                if phi < DAMAGE_PROB {
                    (
                        AdventurerState {
                            status: Status::Damaged,
                            ..*s
                        },
                        DAMAGE_COST,
                    )
                } else {
                    (Self::moved(*s, a), 0.0)
                }
            }
            _ => panic!("invalid adventurer action {a}"),
        };
        StepOutcome {
            observation: self.reading(next_state.value, sub_uniform(phi, 1)),
            next_state,
            reward,
        }
    }

    fn obs_prob(&self, next: &AdventurerState, _a: Action, z: Obs) -> f64 {
        if z as usize >= self.values.len() {
            0.0
        } else if z == Obs::from(next.value) {
            if self.values.len() == 1 {
                1.0
            } else {
                SENSOR_ACCURACY
            }
        } else {
            self.noise_prob()
        }
    }

    fn action_name(&self, a: Action) -> String {
        match a {
            LEFT => "left",
            RIGHT => "right",
            STAY => "stay",
            _ => "?",
        }
        .to_string()
    }
}

impl Tabular for AdventurerModel {
    fn num_indexed_states(&self) -> usize {
        3 * usize::from(CORRIDOR) * self.values.len()
    }

    fn state_index(&self, s: &AdventurerState) -> usize {
        let status = match s.status {
            Status::Alive => 0,
            Status::Damaged => 1,
            Status::Dug => 2,
        };
        (status * usize::from(CORRIDOR) + usize::from(s.pos)) * self.values.len() + usize::from(s.value)
    }

    fn state_at(&self, index: usize) -> AdventurerState {
        let n = self.values.len();
        let value = (index % n) as u16;
        let rest = index / n;
        let pos = (rest % usize::from(CORRIDOR)) as u8;
        let status = match rest / usize::from(CORRIDOR) {
            0 => Status::Alive,
            1 => Status::Damaged,
            _ => Status::Dug,
        };
        AdventurerState { pos, value, status }
    }

    fn transitions(&self, s: &AdventurerState, a: Action) -> Vec<Transition> {
        let idx = |x: &AdventurerState| self.state_index(x);
        if self.is_terminal(s) {
            return vec![Transition { next: idx(s), prob: 1.0, reward: 0.0 }];
        }
        match a {
            STAY if s.pos == CORRIDOR - 1 => vec![Transition {
                next: idx(&AdventurerState { status: Status::Dug, ..*s }),
                prob: 1.0,
                reward: self.values[usize::from(s.value)],
            }],
            STAY => vec![Transition { next: idx(s), prob: 1.0, reward: 0.0 }],
            _ => vec![
                Transition {
                    next: idx(&AdventurerState { status: Status::Damaged, ..*s }),
                    prob: DAMAGE_PROB,
                    reward: DAMAGE_COST,
                },
                Transition {
                    next: idx(&Self::moved(*s, a)),
                    prob: 1.0 - DAMAGE_PROB,
                    reward: 0.0,
                },
            ],
        }
    }

    fn observations(&self) -> Vec<Obs> {
        (0..self.values.len() as Obs).collect()
    }
}

impl Domain for AdventurerModel {
    fn name(&self) -> String {
        format!("adventurer-{}", self.values.len())
    }

    fn sample_world(&self, rng: &mut dyn RngCore) -> AdventurerState {
        let v = (rng.next_u64() % self.values.len() as u64) as u16;
        self.start(v)
    }

    /// Position known, treasure value uniform.
    fn initial_distribution(&self, world: &AdventurerState) -> Vec<(AdventurerState, f64)> {
        let p = 1.0 / self.values.len() as f64;
        (0..self.values.len() as u16)
            .map(|value| (AdventurerState { pos: world.pos, value, status: Status::Alive }, p))
            .collect()
    }

    fn default_policy_name(&self) -> String {
        "fixed:stay".into()
    }

    /// Value of reaching the treasure with no damage at all.
    fn domain_upper(&self, s: &AdventurerState) -> Option<f64> {
        if self.is_terminal(s) {
            return Some(0.0);
        }
        let moves = i32::from(CORRIDOR - 1 - s.pos);
        Some(self.discount.powi(moves) * self.values[usize::from(s.value)])
    }
}
