//! RockSample(n, k): a rover on an `n x n` grid with `k` rocks of unknown
//! quality.
//!
//! Actions are the four moves, `sample`, and one `check` per rock. Sampling
//! a good rock earns +10 and turns it bad; sampling a bad rock or an empty
//! cell costs 10. Leaving the grid to the east earns +10 and ends the
//! episode; other moves off the grid leave the rover in place. A check
//! reports the rock's quality correctly with probability
//! `0.5 + 0.5 * 2^(-d / 20)` where `d` is the Euclidean distance to the rock.
//! All other actions observe nothing.

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{invalid, Domain, DEFAULT_DISCOUNT};
use crate::error::ModelError;
use crate::pomdp::{Action, Obs, Pomdp, StepOutcome, Tabular, Transition};

pub const NORTH: Action = 0;
pub const SOUTH: Action = 1;
pub const EAST: Action = 2;
pub const WEST: Action = 3;
pub const SAMPLE: Action = 4;
/// `check` of rock `i` is action `FIRST_CHECK + i`.
pub const FIRST_CHECK: Action = 5;

pub const OBS_NONE: Obs = 0;
pub const OBS_GOOD: Obs = 1;
pub const OBS_BAD: Obs = 2;

/// Distance at which a check is right only three times in four.
pub const HALF_EFFICIENCY_DISTANCE: f64 = 20.0;

const MAX_ROCKS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RockSampleState {
    pub x: u8,
    pub y: u8,
    /// Bit `i` set when rock `i` is good.
    pub rocks: u16,
    pub exited: bool,
}

impl RockSampleState {
    pub fn is_good(&self, rock: usize) -> bool {
        self.rocks >> rock & 1 == 1
    }
}

#[derive(Debug, Clone)]
pub struct RockSampleModel {
    n: usize,
    rocks: Vec<(u8, u8)>,
    start: (u8, u8),
    discount: f64,
}

const LAYOUT_7_8: [(u8, u8); 8] = [(2, 0), (0, 1), (3, 1), (6, 3), (2, 4), (3, 4), (5, 5), (1, 6)];
const LAYOUT_11_11: [(u8, u8); 11] = [
    (0, 3),
    (0, 7),
    (1, 8),
    (2, 4),
    (3, 3),
    (3, 8),
    (4, 3),
    (5, 8),
    (6, 1),
    (9, 3),
    (9, 9),
];

impl RockSampleModel {
    /// RockSample(n, k). The 7-8 and 11-11 instances use the standard
    /// layouts; other sizes place rocks on distinct cells drawn from
    /// `rock_seed`.
    pub fn new(n: usize, k: usize, rock_seed: u64) -> Result<Self, ModelError> {
        Self::with_discount(n, k, rock_seed, DEFAULT_DISCOUNT)
    }

    pub fn with_discount(n: usize, k: usize, rock_seed: u64, discount: f64) -> Result<Self, ModelError> {
        if !(1..=32).contains(&n) {
            return Err(invalid(format!("grid size {n} outside 1..=32")));
        }
        if k > MAX_ROCKS {
            return Err(invalid(format!("{k} rocks; at most {MAX_ROCKS} supported")));
        }
        if k >= n * n {
            return Err(invalid(format!("{k} rocks do not fit on a {n}x{n} grid")));
        }
        if !(0.0..1.0).contains(&discount) {
            return Err(invalid(format!("discount {discount} outside [0, 1)")));
        }
        let start = (0u8, (n / 2) as u8);
        let rocks = match (n, k) {
            (7, 8) => LAYOUT_7_8.to_vec(),
            (11, 11) => LAYOUT_11_11.to_vec(),
            _ => {
                let mut cells: Vec<(u8, u8)> = (0..n as u8)
                    .flat_map(|x| (0..n as u8).map(move |y| (x, y)))
                    .filter(|&c| c != start)
                    .collect();
                let mut rng = ChaCha8Rng::seed_from_u64(rock_seed);
                cells.shuffle(&mut rng);
                cells.truncate(k);
                cells
            }
        };
        let start = match (n, k) {
            (7, 8) => (0, 3),
            (11, 11) => (0, 5),
            _ => start,
        };
        Ok(RockSampleModel { n, rocks, start, discount })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn rocks(&self) -> &[(u8, u8)] {
        &self.rocks
    }

    pub fn num_rocks(&self) -> usize {
        self.rocks.len()
    }

    pub fn start(&self, rocks: u16) -> RockSampleState {
        RockSampleState { x: self.start.0, y: self.start.1, rocks, exited: false }
    }

    fn rock_at(&self, x: u8, y: u8) -> Option<usize> {
        self.rocks.iter().position(|&r| r == (x, y))
    }

    /// Probability that checking `rock` from `(x, y)` reports correctly.
    pub fn check_accuracy(&self, x: u8, y: u8, rock: usize) -> f64 {
        let (rx, ry) = self.rocks[rock];
        let d = f64::from(x as i32 - rx as i32).hypot(f64::from(y as i32 - ry as i32));
        0.5 + 0.5 * (-d / HALF_EFFICIENCY_DISTANCE).exp2()
    }

    /// Deterministic part of a step: next state and reward.
    fn outcome(&self, s: &RockSampleState, a: Action) -> (RockSampleState, f64) {
        let mut next = *s;
        let last = (self.n - 1) as u8;
        let reward = match a {
            NORTH => {
                next.y = (s.y + 1).min(last);
                0.0
            }
            SOUTH => {
                next.y = s.y.saturating_sub(1);
                0.0
            }
            EAST if s.x == last => {
                next.exited = true;
                10.0
            }
            EAST => {
                next.x += 1;
                0.0
            }
            WEST => {
                next.x = s.x.saturating_sub(1);
                0.0
            }
            SAMPLE => match self.rock_at(s.x, s.y) {
                Some(i) if s.is_good(i) => {
                    next.rocks &= !(1 << i);
                    10.0
                }
                _ => -10.0,
            },
            _ => 0.0,
        };
        (next, reward)
    }

    fn check_rock(&self, a: Action) -> Option<usize> {
        (a >= FIRST_CHECK).then(|| a - FIRST_CHECK)
    }
}

impl Pomdp for RockSampleModel {
    type State = RockSampleState;

    fn num_actions(&self) -> usize {
        FIRST_CHECK + self.rocks.len()
    }

    fn num_observations(&self) -> Option<usize> {
        Some(3)
    }

    /// `n^2 * 2^k`, the count conventionally reported; the absorbing exit
    /// state is not included.
    fn state_space_size(&self) -> Option<usize> {
        Some(self.n * self.n << self.rocks.len())
    }

    fn discount(&self) -> f64 {
        self.discount
    }

    fn max_reward(&self) -> f64 {
        10.0
    }

    fn min_reward(&self) -> f64 {
        -10.0
    }

    fn is_terminal(&self, s: &RockSampleState) -> bool {
        s.exited
    }

    fn step(&self, s: &RockSampleState, a: Action, phi: f64) -> StepOutcome<RockSampleState> {
        debug_assert!(!self.is_terminal(s));
        let (next_state, reward) = self.outcome(s, a);
        let observation = match self.check_rock(a) {
            Some(i) => {
                let correct = phi < self.check_accuracy(s.x, s.y, i);
                if s.is_good(i) == correct {
                    OBS_GOOD
                } else {
                    OBS_BAD
                }
            }
            None => OBS_NONE,
        };
        StepOutcome { next_state, observation, reward }
    }

    fn obs_prob(&self, next: &RockSampleState, a: Action, z: Obs) -> f64 {
        match self.check_rock(a) {
            // a check never moves the rover, so `next` has the sensing position
            Some(i) if !next.exited => {
                let p = self.check_accuracy(next.x, next.y, i);
                let truth = if next.is_good(i) { OBS_GOOD } else { OBS_BAD };
                match z {
                    OBS_NONE => 0.0,
                    _ if z == truth => p,
                    OBS_GOOD | OBS_BAD => 1.0 - p,
                    _ => 0.0,
                }
            }
            _ => f64::from(u8::from(z == OBS_NONE)),
        }
    }

    fn action_name(&self, a: Action) -> String {
        match a {
            NORTH => "north".into(),
            SOUTH => "south".into(),
            EAST => "east".into(),
            WEST => "west".into(),
            SAMPLE => "sample".into(),
            _ if a < self.num_actions() => format!("check{}", a - FIRST_CHECK),
            _ => "?".into(),
        }
    }
}

impl Tabular for RockSampleModel {
    fn num_indexed_states(&self) -> usize {
        (self.n * self.n << self.rocks.len()) + 1
    }

    fn state_index(&self, s: &RockSampleState) -> usize {
        if s.exited {
            return self.num_indexed_states() - 1;
        }
        let cell = usize::from(s.x) * self.n + usize::from(s.y);
        (cell << self.rocks.len()) | usize::from(s.rocks)
    }

    fn state_at(&self, index: usize) -> RockSampleState {
        if index == self.num_indexed_states() - 1 {
            return RockSampleState { x: (self.n - 1) as u8, y: 0, rocks: 0, exited: true };
        }
        let k = self.rocks.len();
        let cell = index >> k;
        RockSampleState {
            x: (cell / self.n) as u8,
            y: (cell % self.n) as u8,
            rocks: (index & ((1 << k) - 1)) as u16,
            exited: false,
        }
    }

    fn transitions(&self, s: &RockSampleState, a: Action) -> Vec<Transition> {
        if self.is_terminal(s) {
            return vec![Transition { next: self.state_index(s), prob: 1.0, reward: 0.0 }];
        }
        let (next, reward) = self.outcome(s, a);
        vec![Transition { next: self.state_index(&next), prob: 1.0, reward }]
    }

    fn observations(&self) -> Vec<Obs> {
        vec![OBS_NONE, OBS_GOOD, OBS_BAD]
    }
}

impl Domain for RockSampleModel {
    fn name(&self) -> String {
        format!("rocksample-{}-{}", self.n, self.rocks.len())
    }

    fn sample_world(&self, rng: &mut dyn RngCore) -> RockSampleState {
        let mask = ((1u64 << self.rocks.len()) - 1) as u16;
        self.start(rng.next_u64() as u16 & mask)
    }

    /// Rover position known, every rock good or bad with equal odds.
    fn initial_distribution(&self, world: &RockSampleState) -> Vec<(RockSampleState, f64)> {
        let count = 1usize << self.rocks.len();
        let p = 1.0 / count as f64;
        (0..count)
            .map(|m| (RockSampleState { x: world.x, y: world.y, rocks: m as u16, exited: false }, p))
            .collect()
    }

    fn default_policy_name(&self) -> String {
        "fixed:east".into()
    }

    /// Every good rock collected as soon as it could be reached, plus the
    /// exit bonus as soon as it could be reached.
    fn domain_upper(&self, s: &RockSampleState) -> Option<f64> {
        if s.exited {
            return Some(0.0);
        }
        let g = self.discount;
        let exit_steps = (self.n - usize::from(s.x)) as i32 - 1;
        let mut total = 10.0 * g.powi(exit_steps);
        for (i, &(rx, ry)) in self.rocks.iter().enumerate() {
            if s.is_good(i) {
                let d = (rx as i32 - s.x as i32).abs() + (ry as i32 - s.y as i32).abs();
                total += 10.0 * g.powi(d);
            }
        }
        Some(total)
    }
}
