use crate::error::{check_dim, Result};
use crate::linalg::{LinearMap, Vector};
use crate::operators::{ForwardBackwardMap, VectorField};
use crate::report::{drive, Advance, SolveReport};
use crate::scalar::Scalar;
use crate::sets::{ConvexProjector, ProjectableSet};

use super::config::{check_tol, resolve_gamma, resolve_lambda, ResolvedSteps, SplitConfig};

/// `C ⊆ Rⁿ`, `Q ⊆ Rᵐ`, `f` on `Rⁿ`, `g` on `Rᵐ` and `A : Rⁿ → Rᵐ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvipProblem<S> {
    c: ProjectableSet<S>,
    q: ProjectableSet<S>,
    f: VectorField<S>,
    g: VectorField<S>,
    a: LinearMap<S>,
}

impl<S: Scalar> SvipProblem<S> {
    pub fn new(
        c: ProjectableSet<S>,
        q: ProjectableSet<S>,
        f: VectorField<S>,
        g: VectorField<S>,
        a: LinearMap<S>,
    ) -> Result<Self> {
        check_dim("SVIP set C", a.cols(), c.dim())?;
        check_dim("SVIP field f", a.cols(), f.dim())?;
        check_dim("SVIP set Q", a.rows(), q.dim())?;
        check_dim("SVIP field g", a.rows(), g.dim())?;
        Ok(Self { c, q, f, g, a })
    }

    pub fn c(&self) -> &ProjectableSet<S> {
        &self.c
    }

    pub fn q(&self) -> &ProjectableSet<S> {
        &self.q
    }

    pub fn f(&self) -> &VectorField<S> {
        &self.f
    }

    pub fn g(&self) -> &VectorField<S> {
        &self.g
    }

    pub fn a(&self) -> &LinearMap<S> {
        &self.a
    }

    /// Source dimension `n`.
    pub fn source_dim(&self) -> usize {
        self.a.cols()
    }

    /// Target dimension `m`.
    pub fn target_dim(&self) -> usize {
        self.a.rows()
    }
}

/// Quantities produced by one direct step.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectStep<S> {
    pub next: Vector<S>,
    /// `u = x + γAᵀ(T − I)(Ax)`, the point `U` is applied to.
    pub mid: Vector<S>,
    /// `‖(T − I)(Ax)‖`.
    pub split_gap: S,
}

/// The direct split solver with validated `λ` and `γ`.
#[derive(Debug, Clone)]
pub struct SvipDirect<'a, S> {
    problem: &'a SvipProblem<S>,
    steps: ResolvedSteps<S>,
    tol: S,
    max_iter: usize,
    reference: Option<Vector<S>>,
}

impl<'a, S: Scalar> SvipDirect<'a, S> {
    /// Requires ISM constants on `f` and `g`, `λ ∈ (0, 2 min{α₁, α₂}]` and
    /// `γ ∈ (0, 1/L)` with `L` the power-iteration estimate of `λ_max(AᵀA)`.
    pub fn new(problem: &'a SvipProblem<S>, cfg: &SplitConfig<S>) -> Result<Self> {
        check_tol(cfg.tol)?;
        let (lambda, lambda_defaulted) = if problem.f.ism().value().is_none() {
            resolve_lambda(cfg.lambda, problem.f.ism(), "f")?
        } else {
            resolve_lambda(cfg.lambda, problem.f.ism().min(problem.g.ism()), "g")?
        };
        let spectral = problem.a.spectral_radius();
        let bound = spectral.safe_upper_bound();
        let (gamma, gamma_defaulted) = resolve_gamma(cfg.gamma, cfg.gamma_safety, bound)?;
        Ok(Self {
            problem,
            steps: ResolvedSteps {
                lambda,
                gamma,
                lipschitz_bound: bound,
                spectral: Some(spectral),
                lambda_defaulted,
                gamma_defaulted,
            },
            tol: cfg.tol,
            max_iter: cfg.max_iter,
            reference: None,
        })
    }

    /// Records `‖x^k − z‖` and `‖u^k − z‖` in the trace.
    pub fn with_reference(mut self, z: Vector<S>) -> Result<Self> {
        check_dim("reference solution", self.problem.source_dim(), z.dim())?;
        self.reference = Some(z);
        Ok(self)
    }

    pub fn steps(&self) -> &ResolvedSteps<S> {
        &self.steps
    }

    fn u_map(&self) -> ForwardBackwardMap<'_, S, ProjectableSet<S>> {
        ForwardBackwardMap::new(&self.problem.c, &self.problem.f, self.steps.lambda)
            .expect("validated at construction")
    }

    fn t_map(&self) -> ForwardBackwardMap<'_, S, ProjectableSet<S>> {
        ForwardBackwardMap::new(&self.problem.q, &self.problem.g, self.steps.lambda)
            .expect("validated at construction")
    }

    pub fn step(&self, x: &Vector<S>) -> Result<DirectStep<S>> {
        check_dim("svip_direct_step", self.problem.source_dim(), x.dim())?;
        Ok(self.step_unchecked(x))
    }

    fn step_unchecked(&self, x: &Vector<S>) -> DirectStep<S> {
        let ax = self.problem.a.apply_unchecked(x);
        let gap = &self.t_map().apply_unchecked(&ax) - &ax;
        let mid = x.add_scaled(self.steps.gamma, &self.problem.a.apply_adjoint_unchecked(&gap));
        DirectStep {
            next: self.u_map().apply_unchecked(&mid),
            split_gap: gap.norm(),
            mid,
        }
    }

    /// `(‖x − U(x)‖, ‖Ax − T(Ax)‖)`.
    pub fn residuals(&self, x: &Vector<S>) -> (S, S) {
        let ax = self.problem.a.apply_unchecked(x);
        (
            self.u_map().residual_unchecked(x),
            self.t_map().residual_unchecked(&ax),
        )
    }

    pub fn solve(&self, x0: Vector<S>) -> Result<SolveReport<S>> {
        check_dim("solve_svip_direct start", self.problem.source_dim(), x0.dim())?;
        drive(
            x0,
            self.tol,
            self.max_iter,
            self.reference.as_ref(),
            |_, x| {
                let s = self.step_unchecked(x);
                Advance {
                    next: s.next,
                    mid: Some(s.mid),
                }
            },
            |x| self.residuals(x),
        )
    }
}

/// One direct step `U(x + γAᵀ(T(Ax) − Ax))`.
pub fn svip_direct_step<S: Scalar>(
    p: &SvipProblem<S>,
    cfg: &SplitConfig<S>,
    x: &Vector<S>,
) -> Result<Vector<S>> {
    Ok(SvipDirect::new(p, cfg)?.step(x)?.next)
}

pub fn solve_svip_direct<S: Scalar>(
    p: &SvipProblem<S>,
    cfg: &SplitConfig<S>,
    x0: Vector<S>,
) -> Result<SolveReport<S>> {
    SvipDirect::new(p, cfg)?.solve(x0)
}
