//! Tag: chase and tag a target that runs away.
//!
//! The map has 29 cells: two full rows of ten (y = 0, 1) and a 3x3 block on
//! top of columns 5..=7 (y = 2..=4). The robot knows its own cell and sees
//! the target only when they share a cell. Moves cost 1; tagging earns +10
//! when the two share a cell (episode over) and costs 10 otherwise.
//!
//! The target reacts to the robot's position before the step: with
//! probability 0.8 it takes one of the moves that strictly increase its
//! Manhattan distance from the robot (uniformly; moves into walls are not
//! candidates), otherwise, or when no such move exists, it stays. Robot moves
//! into walls leave it in place.

use rand::RngCore;

use super::{Domain, DEFAULT_DISCOUNT};
use crate::pomdp::{sub_uniform, Action, Obs, Pomdp, StepOutcome, Tabular, Transition};

pub const NORTH: Action = 0;
pub const SOUTH: Action = 1;
pub const EAST: Action = 2;
pub const WEST: Action = 3;
pub const TAG: Action = 4;

pub const NUM_CELLS: usize = 29;
/// Target slot meaning "already tagged"; the state is terminal.
pub const TAGGED: u8 = NUM_CELLS as u8;
/// Observation emitted when the target is not in the robot's cell.
pub const NOT_SEEN: Obs = NUM_CELLS as Obs;

pub const MOVE_AWAY_PROB: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TagState {
    pub robot: u8,
    pub target: u8,
}

#[derive(Debug, Clone)]
pub struct TagModel {
    discount: f64,
    coords: Vec<(i32, i32)>,
    distances: Vec<i32>,
}

impl Default for TagModel {
    fn default() -> Self {
        Self::new(DEFAULT_DISCOUNT)
    }
}

const DIRS: [(i32, i32); 4] = [(0, 1), (0, -1), (1, 0), (-1, 0)];

impl TagModel {
    pub fn new(discount: f64) -> Self {
        assert!((0.0..1.0).contains(&discount));
        let mut coords = Vec::with_capacity(NUM_CELLS);
        for y in 0..2 {
            for x in 0..10 {
                coords.push((x, y));
            }
        }
        for y in 2..5 {
            for x in 5..8 {
                coords.push((x, y));
            }
        }
        let mut model = TagModel { discount, coords, distances: Vec::new() };
        model.distances = model.all_pairs_bfs();
        model
    }

    fn all_pairs_bfs(&self) -> Vec<i32> {
        let mut table = vec![i32::MAX; NUM_CELLS * NUM_CELLS];
        for a in 0..NUM_CELLS as u8 {
            let row = &mut table[usize::from(a) * NUM_CELLS..][..NUM_CELLS];
            row[usize::from(a)] = 0;
            let mut queue = std::collections::VecDeque::from([a]);
            while let Some(c) = queue.pop_front() {
                for dir in 0..4 {
                    if let Some(n) = self.neighbour(c, dir) {
                        if row[usize::from(n)] == i32::MAX {
                            row[usize::from(n)] = row[usize::from(c)] + 1;
                            queue.push_back(n);
                        }
                    }
                }
            }
        }
        table
    }

    pub fn coords(&self, cell: u8) -> (i32, i32) {
        self.coords[usize::from(cell)]
    }

    pub fn cell_at(&self, x: i32, y: i32) -> Option<u8> {
        self.coords.iter().position(|&c| c == (x, y)).map(|i| i as u8)
    }

    fn neighbour(&self, cell: u8, dir: usize) -> Option<u8> {
        let (x, y) = self.coords(cell);
        let (dx, dy) = DIRS[dir];
        self.cell_at(x + dx, y + dy)
    }

    fn manhattan(&self, a: u8, b: u8) -> i32 {
        let (ax, ay) = self.coords(a);
        let (bx, by) = self.coords(b);
        (ax - bx).abs() + (ay - by).abs()
    }

    /// Shortest-path distance between two cells on the map.
    pub fn path_distance(&self, a: u8, b: u8) -> i32 {
        self.distances[usize::from(a) * NUM_CELLS + usize::from(b)]
    }

    /// Cells the target may flee to, given the robot's cell.
    fn escape_moves(&self, robot: u8, target: u8) -> Vec<u8> {
        let d = self.manhattan(robot, target);
        (0..4)
            .filter_map(|dir| self.neighbour(target, dir))
            .filter(|&c| self.manhattan(robot, c) > d)
            .collect()
    }

    fn target_distribution(&self, robot: u8, target: u8) -> Vec<(u8, f64)> {
        let moves = self.escape_moves(robot, target);
        if moves.is_empty() {
            return vec![(target, 1.0)];
        }
        let p = MOVE_AWAY_PROB / moves.len() as f64;
        let mut out = vec![(target, 1.0 - MOVE_AWAY_PROB)];
        out.extend(moves.into_iter().map(|c| (c, p)));
        out
    }

    fn robot_after(&self, robot: u8, a: Action) -> u8 {
        if a == TAG {
            robot
        } else {
            self.neighbour(robot, a).unwrap_or(robot)
        }
    }

    fn observe(next: &TagState) -> Obs {
        if next.target == TAGGED || next.target == next.robot {
            Obs::from(next.robot)
        } else {
            NOT_SEEN
        }
    }

    pub fn num_states(&self) -> usize {
        NUM_CELLS * (NUM_CELLS + 1)
    }
}

impl Pomdp for TagModel {
    type State = TagState;

    fn num_actions(&self) -> usize {
        5
    }

    fn num_observations(&self) -> Option<usize> {
        Some(NUM_CELLS + 1)
    }

    fn state_space_size(&self) -> Option<usize> {
        Some(self.num_states())
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

    fn is_terminal(&self, s: &TagState) -> bool {
        s.target == TAGGED
    }

    fn step(&self, s: &TagState, a: Action, phi: f64) -> StepOutcome<TagState> {
        debug_assert!(!self.is_terminal(s));
        if a == TAG && s.robot == s.target {
            let next = TagState { robot: s.robot, target: TAGGED };
            return StepOutcome { observation: Self::observe(&next), next_state: next, reward: 10.0 };
        }
        let reward = if a == TAG { -10.0 } else { -1.0 };
        let u = sub_uniform(phi, 0);
        let target = if u < MOVE_AWAY_PROB {
            let moves = self.escape_moves(s.robot, s.target);
            if moves.is_empty() {
                s.target
            } else {
                let i = ((u / MOVE_AWAY_PROB) * moves.len() as f64) as usize;
                moves[i.min(moves.len() - 1)]
            }
        } else {
            s.target
        };
        let next = TagState { robot: self.robot_after(s.robot, a), target };
        StepOutcome { observation: Self::observe(&next), next_state: next, reward }
    }

    fn obs_prob(&self, next: &TagState, _a: Action, z: Obs) -> f64 {
        if Self::observe(next) == z {
            1.0
        } else {
            0.0
        }
    }

    fn action_name(&self, a: Action) -> String {
        match a {
            NORTH => "north",
            SOUTH => "south",
            EAST => "east",
            WEST => "west",
            TAG => "tag",
            _ => "?",
        }
        .to_string()
    }
}

impl Tabular for TagModel {
    fn num_indexed_states(&self) -> usize {
        self.num_states()
    }

    fn state_index(&self, s: &TagState) -> usize {
        usize::from(s.robot) * (NUM_CELLS + 1) + usize::from(s.target)
    }

    fn state_at(&self, index: usize) -> TagState {
        TagState {
            robot: (index / (NUM_CELLS + 1)) as u8,
            target: (index % (NUM_CELLS + 1)) as u8,
        }
    }

    fn transitions(&self, s: &TagState, a: Action) -> Vec<Transition> {
        if self.is_terminal(s) {
            return vec![Transition { next: self.state_index(s), prob: 1.0, reward: 0.0 }];
        }
        if a == TAG && s.robot == s.target {
            let next = TagState { robot: s.robot, target: TAGGED };
            return vec![Transition { next: self.state_index(&next), prob: 1.0, reward: 10.0 }];
        }
        let reward = if a == TAG { -10.0 } else { -1.0 };
        let robot = self.robot_after(s.robot, a);
        self.target_distribution(s.robot, s.target)
            .into_iter()
            .map(|(target, prob)| Transition {
                next: self.state_index(&TagState { robot, target }),
                prob,
                reward,
            })
            .collect()
    }

    fn observations(&self) -> Vec<Obs> {
        (0..=NOT_SEEN).collect()
    }
}

impl Domain for TagModel {
    fn name(&self) -> String {
        "tag".into()
    }

    fn sample_world(&self, rng: &mut dyn RngCore) -> TagState {
        TagState {
            robot: (rng.next_u64() % NUM_CELLS as u64) as u8,
            target: (rng.next_u64() % NUM_CELLS as u64) as u8,
        }
    }

    fn initial_distribution(&self, world: &TagState) -> Vec<(TagState, f64)> {
        let p = 1.0 / NUM_CELLS as f64;
        (0..NUM_CELLS as u8)
            .map(|target| (TagState { robot: world.robot, target }, p))
            .collect()
    }

    fn default_policy_name(&self) -> String {
        "mode-mdp".into()
    }

    /// Target assumed stationary; the robot walks a shortest path and tags.
    fn domain_upper(&self, s: &TagState) -> Option<f64> {
        if self.is_terminal(s) {
            return Some(0.0);
        }
        let d = self.path_distance(s.robot, s.target);
        let g = self.discount;
        Some(-(1.0 - g.powi(d)) / (1.0 - g) + g.powi(d) * 10.0)
    }
}
