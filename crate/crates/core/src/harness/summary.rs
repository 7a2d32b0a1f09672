use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::episode::EpisodeRecord;

/// Version tag written into every log line and summary.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema: u32,
    pub domain: String,
    pub solver: String,
    pub lambda: f64,
    /// `"discounted"` or `"undiscounted"`: which return `mean` refers to.
    pub metric: String,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(episodes)`; 0 for one episode.
    pub stderr: f64,
    pub ci95: [f64; 2],
    pub episodes: usize,
    /// Set when there is a single episode and `stderr` carries no information.
    pub single_episode: bool,
    pub mean_discounted: f64,
    pub mean_undiscounted: f64,
    pub mean_steps: f64,
    pub depletions: usize,
    pub wall_time_s: f64,
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Aggregate episode records. Everything but `wall_time_s` follows from the
/// records and the configuration.
pub fn summarize(records: &[EpisodeRecord], cfg: &RunConfig, wall_time_s: f64) -> Summary {
    let discounted: Vec<f64> = records.iter().map(|r| r.discounted_return).collect();
    let undiscounted: Vec<f64> = records.iter().map(|r| r.undiscounted_return).collect();
    let (mean_d, se_d) = mean_and_stderr(&discounted);
    let (mean_u, se_u) = mean_and_stderr(&undiscounted);
    let (metric, mean, stderr) = if cfg.undiscounted {
        ("undiscounted", mean_u, se_u)
    } else {
        ("discounted", mean_d, se_d)
    };
    Summary {
        schema: SCHEMA_VERSION,
        domain: cfg.domain.clone(),
        solver: serde_json::to_value(cfg.solver).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        lambda: cfg.lambda,
        metric: metric.into(),
        mean,
        stderr,
        ci95: [mean - 1.96 * stderr, mean + 1.96 * stderr],
        episodes: records.len(),
        single_episode: records.len() == 1,
        mean_discounted: mean_d,
        mean_undiscounted: mean_u,
        mean_steps: records.iter().map(|r| r.steps as f64).sum::<f64>() / records.len() as f64,
        depletions: records.iter().map(|r| r.depletions.len()).sum(),
        wall_time_s,
    }
}
