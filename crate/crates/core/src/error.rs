use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value {value} at position {index} is not a positive finite number")]
    NonPositiveRate { index: usize, value: f64 },

    #[error("values {first} and {second} are not distinct (relative gap {gap:e} < tolerance {tolerance:e})")]
    NotDistinct {
        first: f64,
        second: f64,
        gap: f64,
        tolerance: f64,
    },

    #[error("at least 2 rates are required, got {count}")]
    TooFewRates { count: usize },

    #[error("weight {index} has log-magnitude {log_magnitude} beyond the representable range")]
    Overflow { index: usize, log_magnitude: f64 },

    #[error("binomial weights are exact only up to n = {cap}, got n = {n}")]
    BinomialCap { n: usize, cap: usize },

    #[error(
        "density evaluated to {value:e} at x = {x} (below -{threshold:e}); cancellation too severe"
    )]
    NegativeDensity { x: f64, value: f64, threshold: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no convergence after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("series truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },

    #[error("series has zero constant term")]
    ZeroConstantTerm,

    #[error("enumeration of {count} multi-indices exceeds the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },

    #[error("{name}_{k} = {value:e} violates the expected sign structure")]
    StructureViolation {
        name: &'static str,
        k: usize,
        value: f64,
    },

    #[error("series constant term {0} cannot be normalized to 1")]
    NotNormalized(f64),

    #[error("divisor at order {k} is numerically zero ({value:e})")]
    ZeroDivisor { k: usize, value: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("need at least {required} observations, got {len}")]
    InsufficientData { len: usize, required: usize },

    #[error("observation {value} at position {index} is not positive")]
    NonPositiveObservation { index: usize, value: f64 },
}
