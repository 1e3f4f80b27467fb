use thiserror::Error;

/// Errors raised while building or querying problem instances and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("negative weight {value} at row {row}, index {index}")]
    NegativeWeight { row: usize, index: usize, value: f64 },

    #[error("row {row} has zero total mass")]
    ZeroMassRow { row: usize },

    #[error("row {row} sums to {sum}, which is outside the renormalization tolerance")]
    NormalizationDrift { row: usize, sum: f64 },

    #[error("non-finite value at row {row}, index {index}")]
    NonFinite { row: usize, index: usize },

    #[error("{field} entry {value} at row {row}, index {index} lies outside [0, {r_max}]")]
    RewardOutOfRange {
        field: &'static str,
        row: usize,
        index: usize,
        value: f64,
        r_max: f64,
    },

    #[error("reward cap must be at least 1, got {0}")]
    RewardCapTooSmall(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown prompt `{0}`")]
    UnknownPrompt(String),

    #[error("duplicate prompt id `{0}`")]
    DuplicatePrompt(String),

    #[error("instance has no prompts")]
    EmptyInstance,

    #[error("infeasible parameters: {0}")]
    InfeasibleParameters(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("index {index} carries target mass but has zero base probability")]
    UncoveredSupport { index: usize },

    #[error("regularization must be positive, got {0}")]
    NonPositiveBeta(f64),

    #[error("prompt distribution required but not supplied")]
    MissingPromptDistribution,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
