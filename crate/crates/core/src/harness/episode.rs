use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::planner::{Components, Planner};
use crate::belief::ParticleBelief;
use crate::domains::Domain;
use crate::error::{BeliefError, HarnessError};
use crate::pomdp::{derive_seed, Action, Obs};

/// Sub-seed labels. World, filter and planning randomness never share a
/// stream.
pub const WORLD_STREAM: u64 = 1;
pub const BELIEF_STREAM: u64 = 2;
pub const PLAN_STREAM: u64 = 3;

/// Seed of episode `index` under the master seed.
pub fn episode_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, 0x100 + index as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub action: Action,
    pub observation: Obs,
    pub reward: f64,
    pub planning_ms: f64,
    pub trials: usize,
    /// Root gap when planning stopped.
    pub gap: f64,
}

/// The belief lost every particle and was rebuilt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepletionEvent {
    pub step: usize,
    pub particles: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub seed: u64,
    pub discounted_return: f64,
    pub undiscounted_return: f64,
    pub steps: usize,
    pub trajectory: Vec<StepRecord>,
    pub depletions: Vec<DepletionEvent>,
}

impl EpisodeRecord {
    /// `(discounted, undiscounted)` recomputed from the step rewards.
    pub fn recompute_returns(&self, discount: f64) -> (f64, f64) {
        let mut weight = 1.0;
        let mut discounted = 0.0;
        let mut total = 0.0;
        for s in &self.trajectory {
            discounted += weight * s.reward;
            total += s.reward;
            weight *= discount;
        }
        (discounted, total)
    }
}

/// Plan, act in the world, observe and filter until the world terminates or
/// `max_steps` actions have been taken.
pub fn run_episode<M: Domain + 'static>(
    parts: &Components<M>,
    cfg: &RunConfig,
    episode: usize,
    seed: u64,
) -> Result<EpisodeRecord, HarnessError> {
    let model = &*parts.model;
    let mut world_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, WORLD_STREAM));
    let belief_seed = derive_seed(seed, BELIEF_STREAM);
    let plan_seed = derive_seed(seed, PLAN_STREAM);

    let mut world = model.sample_world(&mut world_rng);
    let mut belief = ParticleBelief::from_distribution(&model.initial_distribution(&world), cfg.num_particles(), belief_seed)?;
    let mut planner = Planner::new(parts, cfg)?;

    let mut record = EpisodeRecord {
        episode,
        seed,
        discounted_return: 0.0,
        undiscounted_return: 0.0,
        steps: 0,
        trajectory: Vec::new(),
        depletions: Vec::new(),
    };
    let mut weight = 1.0;
    for step in 0..cfg.max_steps {
        if model.is_terminal(&world) {
            break;
        }
        let start = Instant::now();
        let planned = planner.plan(&belief, derive_seed(plan_seed, step as u64), false)?;
        let planning_ms = start.elapsed().as_secs_f64() * 1e3;

        let out = model.step(&world, planned.action, world_rng.gen());
        record.discounted_return += weight * out.reward;
        record.undiscounted_return += out.reward;
        weight *= model.discount();
        record.trajectory.push(StepRecord {
            action: planned.action,
            observation: out.observation,
            reward: out.reward,
            planning_ms,
            trials: planned.trials,
            gap: planned.gap,
        });
        world = out.next_state;
        if model.is_terminal(&world) {
            break;
        }
        let updated = belief
            .sir_update(planned.action, out.observation, model)
            .and_then(|mut b| b.condition_alive(model).map(|_| b));
        belief = match updated {
            Ok(b) => b,
            Err(BeliefError::ParticleDepletion { particles }) => {
                record.depletions.push(DepletionEvent { step, particles });
                let reseed = derive_seed(belief_seed, 0x1000 + step as u64);
                ParticleBelief::from_distribution(&model.initial_distribution(&world), cfg.num_particles(), reseed)?
            }
            Err(e) => return Err(e.into()),
        };
    }
    record.steps = record.trajectory.len();
    Ok(record)
}
