use std::path::PathBuf;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::anytime::AnytimeConfig;
use crate::domains::{DomainSpec, DEFAULT_DISCOUNT};
use crate::dp::{DpConfig, DEFAULT_NODE_LIMIT};
use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Anytime,
    Dp,
}

impl std::str::FromStr for SolverKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "anytime" => Ok(SolverKind::Anytime),
            "dp" => Ok(SolverKind::Dp),
            other => Err(HarnessError::InvalidConfig(format!("unknown solver `{other}`"))),
        }
    }
}

/// Upper bounds selectable by name.
pub const UPPER_BOUND_NAMES: &[&str] = &["uninformed", "mdp", "ho", "ho-mdp", "domain"];

/// Everything an evaluation needs. Keys match the command-line flags with
/// dashes turned into underscores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub domain: String,
    pub solver: SolverKind,
    #[serde(rename = "K")]
    pub num_scenarios: usize,
    #[serde(rename = "D")]
    pub max_depth: usize,
    pub lambda: f64,
    pub xi: f64,
    pub eps0: f64,
    /// Planning time per step. Unset means 1000 ms, or no clock at all when
    /// `trial_budget` is set, so that budgeted runs are reproducible.
    pub tmax_ms: Option<u64>,
    pub trial_budget: Option<usize>,
    pub discount: f64,
    pub seed: u64,
    pub episodes: usize,
    pub max_steps: usize,
    pub ubound: String,
    pub default_policy: String,
    /// Output directory for `episodes.jsonl` and `summary.json`.
    pub out: Option<PathBuf>,
    /// Report the undiscounted total as the headline number.
    pub undiscounted: bool,
    /// Belief particles; unset means `10 K`.
    pub particles: Option<usize>,
    /// Node cap for the `dp` solver.
    pub node_limit: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            domain: "bridge".into(),
            solver: SolverKind::Anytime,
            num_scenarios: 500,
            max_depth: 90,
            lambda: 0.0,
            xi: 0.95,
            eps0: 0.0,
            tmax_ms: None,
            trial_budget: None,
            discount: DEFAULT_DISCOUNT,
            seed: 0,
            episodes: 1,
            max_steps: 90,
            ubound: "domain".into(),
            default_policy: "domain".into(),
            out: None,
            undiscounted: false,
            particles: None,
            node_limit: DEFAULT_NODE_LIMIT as u64,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &std::path::Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| HarnessError::InvalidConfig(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<DomainSpec, HarnessError> {
        let spec = DomainSpec::parse(&self.domain).ok_or_else(|| HarnessError::UnknownDomain(self.domain.clone()))?;
        if self.episodes == 0 {
            return Err(HarnessError::InvalidConfig("episodes must be at least 1".into()));
        }
        if !UPPER_BOUND_NAMES.contains(&self.ubound.as_str()) {
            return Err(HarnessError::UnknownUpperBound(self.ubound.clone()));
        }
        if !(0.0..1.0).contains(&self.discount) {
            return Err(HarnessError::InvalidConfig(format!("discount = {} outside [0, 1)", self.discount)));
        }
        if self.particles == Some(0) {
            return Err(HarnessError::InvalidConfig("particles must be at least 1".into()));
        }
        self.anytime(0).validate()?;
        Ok(spec)
    }

    pub fn num_particles(&self) -> usize {
        self.particles.unwrap_or(10 * self.num_scenarios)
    }

    pub fn time_budget(&self) -> Option<Duration> {
        match (self.tmax_ms, self.trial_budget) {
            (Some(ms), _) => Some(Duration::from_millis(ms)),
            (None, Some(_)) => None,
            (None, None) => Some(Duration::from_millis(1000)),
        }
    }

    pub fn anytime(&self, seed: u64) -> AnytimeConfig {
        AnytimeConfig {
            num_scenarios: self.num_scenarios,
            max_depth: self.max_depth,
            lambda: self.lambda,
            xi: self.xi,
            eps0: self.eps0,
            time_budget: self.time_budget(),
            trial_budget: self.trial_budget,
            seed,
            check_invariants: false,
        }
    }

    pub fn dp(&self) -> DpConfig {
        DpConfig { max_depth: self.max_depth, lambda: self.lambda, node_limit: u128::from(self.node_limit) }
    }
}
