//! Relaxed extragradient method for the constrained VIP: find `x* ∈ C ∩ Ω`
//! with `⟨f(x*), x − x*⟩ ≥ 0` for all `x ∈ C`.
//!
//! Each step takes a predictor `y = P_C(x − λf(x))`, builds the half-space `T`
//! supporting `C` at `y`, and moves to
//! `α x + (1 − α) P_Ω(P_T(x − λf(y)))`. Only `P_T` (closed form) is needed for
//! the corrector, not a second projection onto `C`.
//!
//! Convergence assumes `f` monotone and `κ`-Lipschitz, `λ_k ∈ [a, b] ⊂ (0, 1/κ)`,
//! `α_k ∈ [c, d] ⊂ (0, 1)` and `Ω ∩ SOL(C, f) ≠ ∅`. The last condition cannot
//! be checked up front; a violating problem shows up as `max_iter`.

use crate::error::{check_dim, ConfigViolation, Result};
use crate::linalg::Vector;
use crate::operators::{ForwardBackwardMap, VectorField};
use crate::report::{drive, Advance, SolveReport, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::scalar::Scalar;
use crate::sets::{cut_from_projection, ConvexProjector, HalfSpaceCut};

/// A CVIP instance. The sets can be any projector, including product sets and
/// implicitly projected subspaces.
#[derive(Debug)]
pub struct CvipProblem<S> {
    c: Box<dyn ConvexProjector<S>>,
    omega: Box<dyn ConvexProjector<S>>,
    f: VectorField<S>,
}

impl<S: Scalar> CvipProblem<S> {
    pub fn new(
        c: impl ConvexProjector<S> + 'static,
        omega: impl ConvexProjector<S> + 'static,
        f: VectorField<S>,
    ) -> Result<Self> {
        Self::from_boxed(Box::new(c), Box::new(omega), f)
    }

    pub fn from_boxed(
        c: Box<dyn ConvexProjector<S>>,
        omega: Box<dyn ConvexProjector<S>>,
        f: VectorField<S>,
    ) -> Result<Self> {
        check_dim("CVIP Ω", c.dim(), omega.dim())?;
        check_dim("CVIP field", c.dim(), f.dim())?;
        Ok(Self { c, omega, f })
    }

    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    pub fn c(&self) -> &dyn ConvexProjector<S> {
        self.c.as_ref()
    }

    pub fn omega(&self) -> &dyn ConvexProjector<S> {
        self.omega.as_ref()
    }

    pub fn field(&self) -> &VectorField<S> {
        &self.f
    }
}

/// Parameter sequence for `λ_k` or `α_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule<S> {
    Constant(S),
    /// Repeats the listed values cyclically.
    Cyclic(Vec<S>),
}

impl<S: Scalar> Schedule<S> {
    pub fn at(&self, k: usize) -> S {
        match self {
            Schedule::Constant(v) => *v,
            Schedule::Cyclic(vs) => vs[k % vs.len()],
        }
    }

    /// Smallest and largest value the schedule produces.
    pub fn bounds(&self) -> std::result::Result<(S, S), ConfigViolation> {
        match self {
            Schedule::Constant(v) => Ok((*v, *v)),
            Schedule::Cyclic(vs) if vs.is_empty() => Err(ConfigViolation::EmptySchedule),
            Schedule::Cyclic(vs) => Ok(vs.iter().fold((vs[0], vs[0]), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvipConfig<S> {
    /// `λ_k`; `None` uses the constant `0.45/κ`.
    pub lambda: Option<Schedule<S>>,
    /// `α_k`.
    pub alpha: Schedule<S>,
    pub tol: S,
    pub max_iter: usize,
}

impl<S: Scalar> Default for CvipConfig<S> {
    fn default() -> Self {
        Self {
            lambda: None,
            alpha: Schedule::Constant(S::lit(0.5)),
            tol: S::lit(DEFAULT_TOL),
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Default constant step `0.9/κ · ½`.
pub fn default_cvip_lambda<S: Scalar>(kappa: S) -> S {
    S::lit(0.45) / kappa
}

/// Result of one extragradient step.
#[derive(Debug, Clone, PartialEq)]
pub struct CvipStep<S> {
    pub next: Vector<S>,
    /// The predictor `y^k ∈ C`.
    pub extragradient: Vector<S>,
    /// The half-space `T_k` supporting `C` at `y^k`.
    pub cut: HalfSpaceCut<S>,
}

fn check_step_params<S: Scalar>(kappa: S, lambda_range: (S, S), alpha_range: (S, S)) -> Result<()> {
    if !(kappa > S::zero()) {
        return Err(ConfigViolation::LipschitzNotPositive {
            kappa: kappa.to_f64_lossy(),
        }
        .into());
    }
    let (a, b) = lambda_range;
    if !(a > S::zero()) {
        return Err(ConfigViolation::StepLowerBound {
            lower: a.to_f64_lossy(),
        }
        .into());
    }
    let limit = S::one() / kappa;
    if !(b < limit) {
        return Err(ConfigViolation::StepUpperBound {
            upper: b.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        }
        .into());
    }
    let (c, d) = alpha_range;
    if !(c > S::zero() && d < S::one()) {
        return Err(ConfigViolation::RelaxationOutOfRange {
            lower: c.to_f64_lossy(),
            upper: d.to_f64_lossy(),
        }
        .into());
    }
    Ok(())
}

fn step_unchecked<S: Scalar>(p: &CvipProblem<S>, x: &Vector<S>, lambda: S, alpha: S) -> CvipStep<S> {
    let z = x.add_scaled(-lambda, &p.f.evaluate_unchecked(x));
    let y = p.c.project_unchecked(&z);
    let cut = cut_from_projection(&z, y.clone());
    let corrector = x.add_scaled(-lambda, &p.f.evaluate_unchecked(&y));
    let pulled = p.omega.project_unchecked(&cut.project_unchecked(&corrector));
    CvipStep {
        next: x.lerp_towards(alpha, &pulled),
        extragradient: y,
        cut,
    }
}

/// One step with explicit `λ ∈ (0, 1/κ)` and `α ∈ (0, 1)`.
pub fn cvip_step<S: Scalar>(p: &CvipProblem<S>, x: &Vector<S>, lambda: S, alpha: S) -> Result<CvipStep<S>> {
    check_dim("cvip_step", p.dim(), x.dim())?;
    check_step_params(p.f.lipschitz(), (lambda, lambda), (alpha, alpha))?;
    Ok(step_unchecked(p, x, lambda, alpha))
}

/// A validated extragradient run over one problem.
#[derive(Debug)]
pub struct CvipSolver<'a, S> {
    problem: &'a CvipProblem<S>,
    lambda: Schedule<S>,
    alpha: Schedule<S>,
    residual_lambda: S,
    tol: S,
    max_iter: usize,
    reference: Option<Vector<S>>,
}

impl<'a, S: Scalar> CvipSolver<'a, S> {
    pub fn new(problem: &'a CvipProblem<S>, cfg: &CvipConfig<S>) -> Result<Self> {
        let kappa = problem.f.lipschitz();
        if !(kappa > S::zero()) {
            return Err(ConfigViolation::LipschitzNotPositive {
                kappa: kappa.to_f64_lossy(),
            }
            .into());
        }
        let lambda = cfg
            .lambda
            .clone()
            .unwrap_or_else(|| Schedule::Constant(default_cvip_lambda(kappa)));
        let lambda_range = lambda.bounds()?;
        check_step_params(kappa, lambda_range, cfg.alpha.bounds()?)?;
        if !(cfg.tol > S::zero()) {
            return Err(ConfigViolation::Tolerance {
                tol: cfg.tol.to_f64_lossy(),
            }
            .into());
        }
        Ok(Self {
            problem,
            residual_lambda: (lambda_range.0 + lambda_range.1) / S::lit(2.0),
            lambda,
            alpha: cfg.alpha.clone(),
            tol: cfg.tol,
            max_iter: cfg.max_iter,
            reference: None,
        })
    }

    /// Records `‖x^k − z‖` in the trace.
    pub fn with_reference(mut self, z: Vector<S>) -> Result<Self> {
        check_dim("reference solution", self.problem.dim(), z.dim())?;
        self.reference = Some(z);
        Ok(self)
    }

    /// The fixed step `λ̄` (midpoint of `[a, b]`) used by the residual metric.
    pub fn residual_lambda(&self) -> S {
        self.residual_lambda
    }

    pub fn lambda_schedule(&self) -> &Schedule<S> {
        &self.lambda
    }

    /// `(vip_residual(C, f, λ̄, x), dist(x, Ω))`.
    pub fn residuals(&self, x: &Vector<S>) -> (S, S) {
        let fb = ForwardBackwardMap::new(self.problem.c.as_ref(), &self.problem.f, self.residual_lambda)
            .expect("dimensions validated at construction");
        (
            fb.residual_unchecked(x),
            x.distance(&self.problem.omega.project_unchecked(x)),
        )
    }

    pub fn step(&self, k: usize, x: &Vector<S>) -> CvipStep<S> {
        step_unchecked(self.problem, x, self.lambda.at(k), self.alpha.at(k))
    }

    pub fn solve(&self, x0: Vector<S>) -> Result<SolveReport<S>> {
        self.solve_observed(x0, |_, _| {})
    }

    /// Like [`CvipSolver::solve`], calling `observe(k, step)` after every step.
    pub fn solve_observed(
        &self,
        x0: Vector<S>,
        mut observe: impl FnMut(usize, &CvipStep<S>),
    ) -> Result<SolveReport<S>> {
        check_dim("solve_cvip start", self.problem.dim(), x0.dim())?;
        drive(
            x0,
            self.tol,
            self.max_iter,
            self.reference.as_ref(),
            |k, x| {
                let s = self.step(k, x);
                observe(k, &s);
                Advance {
                    next: s.next,
                    mid: None,
                }
            },
            |x| self.residuals(x),
        )
    }
}

pub fn solve_cvip<S: Scalar>(p: &CvipProblem<S>, cfg: &CvipConfig<S>, x0: Vector<S>) -> Result<SolveReport<S>> {
    CvipSolver::new(p, cfg)?.solve(x0)
}
