use crate::error::{ConfigViolation, Result};
use crate::linalg::SpectralEstimate;
use crate::operators::{check_lambda_against_ism, IsmConstant};
use crate::report::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::scalar::Scalar;

/// Settings for the direct and parallel split solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitConfig<S> {
    /// `λ` of `U = P_C(I − λf)` and `T = P_Q(I − λg)`; `None` picks
    /// `min{1, 2α}/2`, or 1 when every field is constant.
    pub lambda: Option<S>,
    /// Relaxation `γ ∈ (0, 1/L)`; `None` picks `gamma_safety / L̂`.
    pub gamma: Option<S>,
    pub tol: S,
    pub max_iter: usize,
    pub gamma_safety: S,
}

impl<S: Scalar> Default for SplitConfig<S> {
    fn default() -> Self {
        Self {
            lambda: None,
            gamma: None,
            tol: S::lit(DEFAULT_TOL),
            max_iter: DEFAULT_MAX_ITER,
            gamma_safety: S::lit(0.9),
        }
    }
}

impl<S: Scalar> SplitConfig<S> {
    pub fn with_gamma(mut self, gamma: S) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_lambda(mut self, lambda: S) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_tol(mut self, tol: S) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }
}

/// The step sizes a split solver actually runs with.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSteps<S> {
    pub lambda: S,
    pub gamma: S,
    /// The `L` that `γ` was checked against (already inflated for estimation error).
    pub lipschitz_bound: S,
    /// Power-iteration estimate of `‖A‖²`, when one was needed.
    pub spectral: Option<SpectralEstimate<S>>,
    pub lambda_defaulted: bool,
    pub gamma_defaulted: bool,
}

pub(crate) fn resolve_lambda<S: Scalar>(
    requested: Option<S>,
    ism: IsmConstant<S>,
    role: &str,
) -> Result<(S, bool)> {
    let Some(alpha) = ism.value() else {
        return Err(ConfigViolation::NotIsm { role: role.into() }.into());
    };
    match requested {
        Some(lambda) => {
            if !(lambda > S::zero()) {
                return Err(ConfigViolation::LambdaNotPositive {
                    lambda: lambda.to_f64_lossy(),
                }
                .into());
            }
            check_lambda_against_ism(lambda, ism, role)?;
            Ok((lambda, false))
        }
        None if alpha.is_finite() => Ok((S::one().min(S::lit(2.0) * alpha) / S::lit(2.0), true)),
        None => Ok((S::one(), true)),
    }
}

pub(crate) fn resolve_gamma<S: Scalar>(requested: Option<S>, safety: S, bound: S) -> Result<(S, bool)> {
    if !(safety > S::zero() && safety < S::one()) {
        return Err(ConfigViolation::SafetyFactor {
            value: safety.to_f64_lossy(),
        }
        .into());
    }
    match requested {
        Some(gamma) => {
            if !(gamma > S::zero()) {
                return Err(ConfigViolation::GammaNotPositive {
                    gamma: gamma.to_f64_lossy(),
                }
                .into());
            }
            if gamma * bound >= S::one() {
                return Err(ConfigViolation::GammaTooLarge {
                    gamma: gamma.to_f64_lossy(),
                    limit: (S::one() / bound).to_f64_lossy(),
                }
                .into());
            }
            Ok((gamma, false))
        }
        None if bound > S::zero() => Ok((safety / bound, true)),
        None => Ok((S::one(), true)),
    }
}

pub(crate) fn check_tol<S: Scalar>(tol: S) -> Result<()> {
    if tol > S::zero() {
        Ok(())
    } else {
        Err(ConfigViolation::Tolerance {
            tol: tol.to_f64_lossy(),
        }
        .into())
    }
}
