use thiserror::Error;

/// Errors raised by the solvers, metrics and experiment drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed linear program: {0}")]
    MalformedProblem(String),
    #[error("simplex iteration limit of {0} reached")]
    IterationLimit(usize),
    #[error("invalid support box: {0}")]
    InvalidSupport(String),
    #[error("candidate pool of {pool} points cannot supply {count} quantizers")]
    PoolTooSmall { count: usize, pool: usize },
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("ambiguity set is not linear in p (mean-variance mode)")]
    NonLinearSet,
    #[error("ambiguity set has no feasible member")]
    InfeasibleSet,
    #[error("invalid ambiguity specification: {0}")]
    InvalidSpec(String),
    #[error("nominal atom {0} lies outside the support")]
    NominalOutsideSupport(usize),
    #[error("anchor distribution is infeasible (slack {0})")]
    InfeasibleAnchor(f64),
    #[error("Slater margin must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("operation requires {expected} mode")]
    WrongMode { expected: &'static str },
    #[error("evaluation produced a non-finite value at sample {0}")]
    EvaluationError(usize),
    #[error("invalid decision domain: {0}")]
    InvalidDomain(String),
    #[error("every candidate decision is infeasible")]
    AllCandidatesInfeasible,
    #[error("no feasible starting distribution for the mean-variance solver")]
    NoFeasibleStart,
    #[error("missing constant {0}")]
    MissingConstant(&'static str),
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("at least 2 replicates are required, got {0}")]
    TooFewReplicates(usize),
    #[error("only {feasible} feasible replicates out of {total}")]
    TooFewFeasibleReplicates { feasible: usize, total: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
