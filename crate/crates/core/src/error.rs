use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid action {action}; model has {num_actions} actions")]
    InvalidAction { action: usize, num_actions: usize },
    #[error("step called on terminal state {0}")]
    TerminalState(String),
    #[error("random number {0} outside [0, 1)")]
    RandomOutOfRange(f64),
    #[error("invalid domain parameters: {0}")]
    InvalidParameters(String),
    #[error("model does not provide {0}")]
    Unsupported(&'static str),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeliefError {
    /// Exact update with an observation the prior cannot produce.
    #[error("impossible observation: P(z | b, a) = {likelihood}")]
    ImpossibleObservation { likelihood: f64 },
    /// Every particle received zero weight.
    #[error("particle depletion: all {particles} particles have zero weight")]
    ParticleDepletion { particles: usize },
    #[error("belief is empty")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("full tree would need about {estimated} nodes, above the limit of {limit}")]
    Capacity { estimated: u128, limit: u128 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("unknown upper bound `{0}`")]
    UnknownUpperBound(String),
    #[error("unknown default policy `{0}`")]
    UnknownDefaultPolicy(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    /// Usage errors map to exit code 2, everything else to 1.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            HarnessError::UnknownDomain(_)
                | HarnessError::UnknownUpperBound(_)
                | HarnessError::UnknownDefaultPolicy(_)
                | HarnessError::InvalidConfig(_)
                | HarnessError::Solver(SolverError::InvalidConfig(_))
        )
    }
}
