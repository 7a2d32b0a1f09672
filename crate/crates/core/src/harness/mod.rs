//! Running episodes, aggregating returns, and writing logs.

mod config;
mod episode;
mod planner;
mod summary;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{RunConfig, SolverKind, UPPER_BOUND_NAMES};
pub use episode::{
    episode_seed, run_episode, DepletionEvent, EpisodeRecord, StepRecord, BELIEF_STREAM, PLAN_STREAM, WORLD_STREAM,
};
pub use planner::{Components, Planned, Planner, HO_MDP_HORIZON};
pub use summary::{summarize, Summary, SCHEMA_VERSION};

use crate::belief::ParticleBelief;
use crate::domains::{AdventurerModel, BridgeModel, Domain, DomainSpec, RockSampleModel, TagModel};
use crate::error::HarnessError;
use crate::pomdp::derive_seed;
use crate::tree::PolicyTree;

/// λ values tried by [`sweep`].
pub const SWEEP_GRID: [f64; 5] = [0.0, 0.01, 0.1, 1.0, 10.0];

/// Work that needs the concrete model type.
pub trait DomainTask {
    type Output;
    fn run<M: Domain + 'static>(self, model: Arc<M>) -> Result<Self::Output, HarnessError>;
}

/// Build the domain named by `spec` and hand it to `task`.
pub fn with_domain<T: DomainTask>(spec: &DomainSpec, discount: f64, task: T) -> Result<T::Output, HarnessError> {
    match spec {
        DomainSpec::Tag => task.run(Arc::new(TagModel::new(discount))),
        DomainSpec::Bridge => task.run(Arc::new(BridgeModel::new(discount))),
        DomainSpec::Adventurer { values } => task.run(Arc::new(AdventurerModel::new(values.clone(), discount)?)),
        DomainSpec::RockSample { n, k, rock_seed } => {
            task.run(Arc::new(RockSampleModel::with_discount(*n, *k, *rock_seed, discount)?))
        }
    }
}

/// Every episode of `cfg`, in episode order.
pub fn run_episodes(cfg: &RunConfig) -> Result<Vec<EpisodeRecord>, HarnessError> {
    struct Task<'a>(&'a RunConfig);
    impl DomainTask for Task<'_> {
        type Output = Vec<EpisodeRecord>;
        fn run<M: Domain + 'static>(self, model: Arc<M>) -> Result<Self::Output, HarnessError> {
            let cfg = self.0;
            let parts = Components::resolve(model, cfg)?;
            let mut records = (0..cfg.episodes)
                .into_par_iter()
                .map(|i| run_episode(&parts, cfg, i, episode_seed(cfg.seed, i)))
                .collect::<Result<Vec<_>, _>>()?;
            records.sort_by_key(|r| r.episode);
            Ok(records)
        }
    }
    let spec = cfg.validate()?;
    with_domain(&spec, cfg.discount, Task(cfg))
}

/// Run every episode, aggregate, and write the logs when `cfg.out` is set.
pub fn evaluate(cfg: &RunConfig) -> Result<Summary, HarnessError> {
    let start = Instant::now();
    let records = run_episodes(cfg)?;
    let summary = summarize(&records, cfg, start.elapsed().as_secs_f64());
    if let Some(dir) = &cfg.out {
        write_outputs(dir, &records, &summary)?;
    }
    Ok(summary)
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.display().to_string(), source }
}

/// `dir/episodes.jsonl` (one record per line, episode order) and
/// `dir/summary.json`.
pub fn write_outputs(dir: &Path, records: &[EpisodeRecord], summary: &Summary) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_error(dir))?;
    let log_path = dir.join("episodes.jsonl");
    let mut log = Vec::new();
    for r in records {
        let mut line = serde_json::to_value(r)?;
        line["schema"] = SCHEMA_VERSION.into();
        serde_json::to_writer(&mut log, &line)?;
        log.push(b'\n');
    }
    fs::File::create(&log_path)
        .and_then(|mut f| f.write_all(&log))
        .map_err(io_error(&log_path))?;
    let summary_path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(summary)?;
    fs::write(&summary_path, text + "\n").map_err(io_error(&summary_path))?;
    Ok(())
}

/// Read back an episode log.
pub fn read_episode_log(path: &Path) -> Result<Vec<EpisodeRecord>, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_error(path))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(HarnessError::from))
        .collect()
}

/// Result of a λ sweep.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub runs: Vec<(f64, Summary)>,
    pub best_lambda: f64,
}

/// Evaluate `cfg` at every λ of [`SWEEP_GRID`] and pick the best mean; ties
/// go to the smaller λ. With `cfg.out` set, each λ writes to its own
/// subdirectory `lambda-<value>`.
pub fn sweep(cfg: &RunConfig) -> Result<SweepResult, HarnessError> {
    let mut runs = Vec::with_capacity(SWEEP_GRID.len());
    for lambda in SWEEP_GRID {
        let mut c = cfg.clone();
        c.lambda = lambda;
        c.out = cfg.out.as_ref().map(|d| sweep_dir(d, lambda));
        runs.push((lambda, evaluate(&c)?));
    }
    let best_lambda = runs
        .iter()
        .fold(None::<&(f64, Summary)>, |best, run| match best {
            Some(b) if b.1.mean >= run.1.mean => Some(b),
            _ => Some(run),
        })
        .map(|r| r.0)
        .unwrap_or(0.0);
    Ok(SweepResult { runs, best_lambda })
}

/// The policy tree planned at the start of episode 0 of `cfg`.
pub fn dump_policy(cfg: &RunConfig) -> Result<PolicyTree, HarnessError> {
    struct Task<'a>(&'a RunConfig);
    impl DomainTask for Task<'_> {
        type Output = PolicyTree;
        fn run<M: Domain + 'static>(self, model: Arc<M>) -> Result<PolicyTree, HarnessError> {
            let cfg = self.0;
            let parts = Components::resolve(model, cfg)?;
            let seed = episode_seed(cfg.seed, 0);
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, WORLD_STREAM));
            let world = parts.model.sample_world(&mut rng);
            let belief = ParticleBelief::from_distribution(
                &parts.model.initial_distribution(&world),
                cfg.num_particles(),
                derive_seed(seed, BELIEF_STREAM),
            )?;
            let mut planner = Planner::new(&parts, cfg)?;
            let planned = planner.plan(&belief, derive_seed(derive_seed(seed, PLAN_STREAM), 0), true)?;
            Ok(planned.policy.unwrap_or_else(PolicyTree::singleton))
        }
    }
    let spec = cfg.validate()?;
    with_domain(&spec, cfg.discount, Task(cfg))
}

/// Where one λ of a sweep writes its logs.
pub fn sweep_dir(base: &Path, lambda: f64) -> PathBuf {
    base.join(format!("lambda-{lambda}"))
}
