//! Command-line front end: `run`, `sweep`, `theory` and `dump-policy`.

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::domains::{Domain, DomainSpec};
use crate::error::HarnessError;
use crate::harness::{self, DomainTask, RunConfig, Summary};
use crate::theory::{induced_lambda, theorem1_penalty, TheoremParams};

#[derive(Debug, Parser)]
#[command(name = "despot", version, about = "Online POMDP planning with sparse belief trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a configuration over a number of episodes.
    Run(RunArgs),
    /// Evaluate each penalty of the grid 0, 0.01, 0.1, 1, 10.
    Sweep(RunArgs),
    /// Print the generalization penalty for a range of policy sizes.
    Theory(TheoryArgs),
    /// Plan once from the initial belief and print the policy tree as JSON.
    DumpPolicy(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    domain: Option<String>,
    /// `anytime` or `dp`.
    #[arg(long)]
    solver: Option<String>,
    /// Number of scenarios.
    #[arg(short = 'K')]
    k: Option<usize>,
    /// Search depth.
    #[arg(short = 'D')]
    d: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    eps0: Option<f64>,
    #[arg(long)]
    tmax_ms: Option<u64>,
    #[arg(long)]
    trial_budget: Option<usize>,
    #[arg(long)]
    discount: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// uninformed, mdp, ho, ho-mdp or domain.
    #[arg(long)]
    ubound: Option<String>,
    /// fixed:<action>, mode-mdp or domain.
    #[arg(long)]
    default_policy: Option<String>,
    /// Output directory (`run`, `sweep`) or file (`dump-policy`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report undiscounted totals.
    #[arg(long)]
    undiscounted: bool,
    /// Belief particles (default 10 K).
    #[arg(long)]
    particles: Option<usize>,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $(if let Some(v) = self.$flag { cfg.$field = v; })*
            };
        }
        take!(
            domain => domain,
            k => num_scenarios,
            d => max_depth,
            lambda => lambda,
            xi => xi,
            eps0 => eps0,
            discount => discount,
            seed => seed,
            episodes => episodes,
            max_steps => max_steps,
            ubound => ubound,
            default_policy => default_policy,
        );
        if let Some(s) = self.solver {
            cfg.solver = s.parse()?;
        }
        if self.tmax_ms.is_some() {
            cfg.tmax_ms = self.tmax_ms;
        }
        if self.trial_budget.is_some() {
            cfg.trial_budget = self.trial_budget;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if self.particles.is_some() {
            cfg.particles = self.particles;
        }
        cfg.undiscounted |= self.undiscounted;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct TheoryArgs {
    #[arg(long, default_value = "tag")]
    domain: String,
    #[arg(short = 'K', default_value_t = 500)]
    k: usize,
    #[arg(short = 'D', default_value_t = 90)]
    d: usize,
    #[arg(long, default_value_t = 0.1)]
    tau: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = crate::domains::DEFAULT_DISCOUNT)]
    discount: f64,
    /// Largest policy size in the table.
    #[arg(long, default_value_t = 10)]
    max_size: usize,
}

fn summary_line(s: &Summary) -> String {
    format!(
        "domain={} solver={} lambda={} {}_mean={:.4} stderr={:.4} ci95=[{:.4}, {:.4}] episodes={}{} wall={:.2}s",
        s.domain,
        s.solver,
        s.lambda,
        s.metric,
        s.mean,
        s.stderr,
        s.ci95[0],
        s.ci95[1],
        s.episodes,
        if s.single_episode { " (n=1)" } else { "" },
        s.wall_time_s
    )
}

fn theory(args: TheoryArgs) -> Result<(), HarnessError> {
    struct Sizes;
    impl DomainTask for Sizes {
        type Output = (usize, usize, f64);
        fn run<M: Domain + 'static>(self, model: Arc<M>) -> Result<Self::Output, HarnessError> {
            Ok((model.num_actions(), model.observations().len(), model.reward_span()))
        }
    }
    let spec = DomainSpec::parse(&args.domain).ok_or_else(|| HarnessError::UnknownDomain(args.domain.clone()))?;
    let (num_actions, num_observations, span) = harness::with_domain(&spec, args.discount, Sizes)?;
    let params = TheoremParams {
        tau: args.tau,
        alpha: args.alpha,
        num_scenarios: args.k,
        depth: args.d,
        num_actions,
        num_observations,
        max_reward: span,
        discount: args.discount,
    };
    params.validate().map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
    println!(
        "domain={} K={} D={} |A|={} |Z|={} R={} tau={} alpha={}",
        args.domain, args.k, args.d, num_actions, num_observations, span, args.tau, args.alpha
    );
    println!("size\tpenalty");
    for size in 0..=args.max_size {
        println!("{size}\t{:.4}", theorem1_penalty(&params, size));
    }
    println!("induced_lambda={:.4}", induced_lambda(&params));
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.into_config()?;
            let summary = harness::evaluate(&cfg)?;
            println!("{}", summary_line(&summary));
        }
        Command::Sweep(args) => {
            let cfg = args.into_config()?;
            let result = harness::sweep(&cfg)?;
            for (_, s) in &result.runs {
                println!("{}", summary_line(s));
            }
            let best = result.runs.iter().find(|(l, _)| *l == result.best_lambda).expect("best is in the grid");
            println!("best lambda={} mean={:.4} stderr={:.4}", result.best_lambda, best.1.mean, best.1.stderr);
        }
        Command::Theory(args) => theory(args)?,
        Command::DumpPolicy(args) => {
            let mut cfg = args.into_config()?;
            let target = cfg.out.take();
            let tree = harness::dump_policy(&cfg)?;
            let text = serde_json::to_string_pretty(&tree.to_json())?;
            match target {
                Some(path) => std::fs::write(&path, text + "\n")
                    .map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?,
                None => println!("{text}"),
            }
        }
    }
    Ok(())
}

/// Parse `argv` (program name first), run, and return the exit code: 0 on
/// success, 2 for usage errors, 1 for failures at run time.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(run(["despot", "run", "--domain", "nosuch"]), 2);
        assert_eq!(run(["despot", "run", "--no-such-flag"]), 2);
        assert_eq!(run(["despot", "frobnicate"]), 2);
        assert_eq!(run(["despot", "theory", "--max-size", "2"]), 0);
        assert_eq!(run(["despot", "run", "--ubound", "magic"]), 2);
    }

    #[test]
    fn flags_override_config_file() {
        let file = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(file.path(), r#"{"domain": "tag", "K": 7, "lambda": 0.5}"#).unwrap();
        let cli = Cli::try_parse_from([
            "despot",
            "run",
            "--config",
            file.path().to_str().unwrap(),
            "-K",
            "9",
            "--tmax-ms",
            "20",
        ])
        .unwrap();
        let Command::Run(args) = cli.command else { panic!() };
        let cfg = args.into_config().unwrap();
        assert_eq!(cfg.domain, "tag");
        assert_eq!(cfg.num_scenarios, 9);
        assert_eq!(cfg.lambda, 0.5);
        assert_eq!(cfg.tmax_ms, Some(20));
    }
}
