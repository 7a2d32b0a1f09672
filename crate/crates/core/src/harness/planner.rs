//! Bounds, default policy and solver for one run, resolved from names.

use std::sync::{Arc, OnceLock};

use super::config::{RunConfig, SolverKind};
use crate::anytime::{build_despot_from_scenarios, root_action};
use crate::belief::ParticleBelief;
use crate::bounds::{
    mdp_value_iteration, DefaultPolicy, DomainUpper, FixedAction, HoUpper, MdpSolution, MdpUpper, ModeMdp,
    UninformedUpper, UpperBound,
};
use crate::domains::Domain;
use crate::dp::solve_full;
use crate::error::{HarnessError, SolverError};
use crate::pomdp::{Action, ScenarioSet};
use crate::tree::PolicyTree;

/// Trellis length of the `ho-mdp` bound.
pub const HO_MDP_HORIZON: usize = 10;

const MDP_TOLERANCE: f64 = 1e-6;

/// Read-only pieces shared by every episode of a run.
pub struct Components<M: Domain> {
    pub model: Arc<M>,
    pub policy: Arc<dyn DefaultPolicy<M>>,
    pub ubound: String,
    mdp: OnceLock<Arc<MdpSolution>>,
}

impl<M: Domain + 'static> Components<M> {
    pub fn resolve(model: Arc<M>, cfg: &RunConfig) -> Result<Self, HarnessError> {
        let mdp = OnceLock::new();
        let mut name = cfg.default_policy.clone();
        if name == "domain" {
            name = model.default_policy_name();
        }
        let mut parts = Components { model, policy: Arc::new(FixedAction(0)), ubound: cfg.ubound.clone(), mdp };
        parts.policy = if name == "mode-mdp" {
            Arc::new(ModeMdp::new(parts.mdp_solution()?))
        } else {
            let action = name
                .strip_prefix("fixed:")
                .and_then(|a| parts.model.parse_action(a))
                .ok_or_else(|| HarnessError::UnknownDefaultPolicy(name.clone()))?;
            Arc::new(FixedAction(action))
        };
        if parts.ubound == "mdp" || parts.ubound == "ho-mdp" {
            parts.mdp_solution()?;
        }
        Ok(parts)
    }

    /// `V_MDP`, solved on first use.
    pub fn mdp_solution(&self) -> Result<Arc<MdpSolution>, HarnessError> {
        if let Some(s) = self.mdp.get() {
            return Ok(s.clone());
        }
        let solved = Arc::new(mdp_value_iteration(&*self.model, MDP_TOLERANCE)?);
        Ok(self.mdp.get_or_init(|| solved).clone())
    }

    /// A fresh upper bound for one planner; memoizing bounds keep per-search
    /// state so each episode gets its own.
    pub fn upper_bound(&self, depth: usize) -> Result<Box<dyn UpperBound<M>>, HarnessError> {
        Ok(match self.ubound.as_str() {
            "uninformed" => Box::new(UninformedUpper),
            "domain" => Box::new(DomainUpper),
            "mdp" => Box::new(MdpUpper { solution: self.mdp_solution()? }),
            "ho" => Box::new(HoUpper::uninformed(0, depth)),
            "ho-mdp" => Box::new(HoUpper::with_mdp(0, depth.min(HO_MDP_HORIZON), self.mdp_solution()?)),
            other => return Err(HarnessError::UnknownUpperBound(other.into())),
        })
    }
}

/// Outcome of planning one step.
#[derive(Debug, Clone)]
pub struct Planned {
    pub action: Action,
    pub trials: usize,
    /// Root gap when the search stopped; 0 for the exact solver.
    pub gap: f64,
    pub policy: Option<PolicyTree>,
}

/// One agent's planner: owns its upper bound, shares the rest.
pub struct Planner<'a, M: Domain> {
    parts: &'a Components<M>,
    cfg: &'a RunConfig,
    upper: Box<dyn UpperBound<M>>,
}

impl<'a, M: Domain + 'static> Planner<'a, M> {
    pub fn new(parts: &'a Components<M>, cfg: &'a RunConfig) -> Result<Self, HarnessError> {
        let depth = crate::anytime::effective_depth(cfg.max_depth, cfg.lambda, &*parts.model);
        Ok(Planner { parts, cfg, upper: parts.upper_bound(depth)? })
    }

    /// Sample scenarios from `belief` with `seed` and choose an action.
    /// With `keep_policy` the chosen policy tree is returned as well.
    pub fn plan(
        &mut self,
        belief: &ParticleBelief<M::State>,
        seed: u64,
        keep_policy: bool,
    ) -> Result<Planned, SolverError> {
        let scenarios = belief.sample_scenarios(self.cfg.num_scenarios, seed);
        self.plan_scenarios(&scenarios, keep_policy)
    }

    pub fn plan_scenarios(&mut self, scenarios: &ScenarioSet<M::State>, keep_policy: bool) -> Result<Planned, SolverError> {
        let model = &*self.parts.model;
        let policy = &*self.parts.policy;
        match self.cfg.solver {
            SolverKind::Anytime => {
                let cfg = self.cfg.anytime(scenarios.seed);
                let (tree, stats) = build_despot_from_scenarios(scenarios, model, &mut *self.upper, policy, &cfg);
                Ok(Planned {
                    action: root_action(&tree, model, policy),
                    trials: stats.trials,
                    gap: stats.final_gap,
                    policy: keep_policy.then(|| tree.lower_policy()),
                })
            }
            SolverKind::Dp => {
                let result = solve_full(scenarios, model, policy, &self.cfg.dp())?;
                let action = result.root_action.unwrap_or_else(|| {
                    let live: Vec<_> =
                        scenarios.particles().into_iter().filter(|p| !model.is_terminal(&p.state)).collect();
                    if live.is_empty() {
                        0
                    } else {
                        policy.action(model, &live)
                    }
                });
                Ok(Planned { action, trials: 0, gap: 0.0, policy: keep_policy.then_some(result.policy) })
            }
        }
    }
}
