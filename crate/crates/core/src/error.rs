use thiserror::Error;

/// Errors raised by the solver.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("recurrence denominator (n+1)(n+nu) vanishes at n = {n}")]
    ZeroDenominator { n: usize },

    #[error("omega is undefined when epsilon = 0; only the product epsilon*omega is available")]
    DegenerateOmega,

    #[error("string tension b must be positive, got {0}")]
    NonPositiveTension(String),

    #[error("quadratic strength c must be positive, got {0}")]
    NonPositiveC(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("characteristic polynomial is constant ({})", if *.identically_zero { "identically zero: the accessory parameter is free" } else { "nonzero: no solution" })]
    DegreeZero { identically_zero: bool },

    #[error("interval does not bracket a sign change")]
    NoSignChange,

    #[error("no admissible root: {0}")]
    NoAdmissibleRoot(String),

    #[error("series residual |d_(N+1)| / max|d_n| = {residual:e} exceeds tolerance")]
    ResidualTooLarge { residual: f64 },

    #[error("step size underflow at rho = {rho}")]
    StepFailure { rho: f64 },

    #[error("bisection endpoints share the classification {0}")]
    SameClassification(String),

    #[error("design matrix is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("mu = 0: growth law is undefined")]
    ZeroMu,

    #[error("series terms have not decayed at z = {z} (last term ratio {ratio:e})")]
    SummationUnreliable { z: f64, ratio: f64 },

    #[error("outer shells of the amplitude sum grow ({0})")]
    NonConvergent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
