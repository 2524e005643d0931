use thiserror::Error;

/// A step-size or schedule bound that a solver configuration violated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigViolation {
    #[error("γ ≥ 1/L: gamma = {gamma} but 1/L = {limit}")]
    GammaTooLarge { gamma: f64, limit: f64 },
    #[error("γ must be positive, got {gamma}")]
    GammaNotPositive { gamma: f64 },
    #[error("λ > 2α: lambda = {lambda} but 2α = {limit} for {role}")]
    LambdaAboveTwiceIsm { lambda: f64, limit: f64, role: String },
    #[error("λ must be positive, got {lambda}")]
    LambdaNotPositive { lambda: f64 },
    #[error("b ≥ 1/κ: largest λ_k = {upper} but 1/κ = {limit}")]
    StepUpperBound { upper: f64, limit: f64 },
    #[error("a must be positive: smallest λ_k = {lower}")]
    StepLowerBound { lower: f64 },
    #[error("relaxation α_k must lie in (0, 1), got range [{lower}, {upper}]")]
    RelaxationOutOfRange { lower: f64, upper: f64 },
    #[error("gamma_safety must lie in (0, 1), got {value}")]
    SafetyFactor { value: f64 },
    #[error("κ must be positive for the extragradient method, got {kappa}")]
    LipschitzNotPositive { kappa: f64 },
    #[error("{role} has no inverse-strong-monotonicity constant")]
    NotIsm { role: String },
    #[error("tolerance must be positive, got {tol}")]
    Tolerance { tol: f64 },
    #[error("schedule must contain at least one value")]
    EmptySchedule,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("invalid operator: {0}")]
    InvalidField(String),
    #[error("invalid linear map: {0}")]
    InvalidMap(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("rejected configuration: {0}")]
    Config(#[from] ConfigViolation),
    #[error("iterate became non-finite at iteration {iteration}")]
    Diverged { iteration: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}
