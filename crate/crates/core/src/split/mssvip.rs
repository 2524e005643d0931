use crate::error::{check_dim, Error, Result};
use crate::linalg::{LinearMap, Vector};
use crate::operators::{ForwardBackwardMap, IsmConstant, VectorField};
use crate::report::{drive, Advance, SolveReport};
use crate::scalar::Scalar;
use crate::sets::{ConvexProjector, ProjectableSet};

use super::config::{check_tol, resolve_gamma, resolve_lambda, ResolvedSteps, SplitConfig};

/// Several constrained VIPs `(Cᵢ, fᵢ)` in `Rⁿ` and `(Qⱼ, gⱼ)` in `Rᵐ`, coupled
/// through `A`, with positive weights `αᵢ` and `βⱼ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MssvipProblem<S> {
    sources: Vec<(ProjectableSet<S>, VectorField<S>)>,
    targets: Vec<(ProjectableSet<S>, VectorField<S>)>,
    a: LinearMap<S>,
    alpha_weights: Vec<S>,
    beta_weights: Vec<S>,
}

fn check_weights<S: Scalar>(weights: &[S], expected: usize, what: &str) -> Result<()> {
    if weights.len() != expected {
        return Err(Error::InvalidProblem(format!(
            "{what}: expected {expected} weights, got {}",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > S::zero() && w.is_finite())) {
        return Err(Error::InvalidProblem(format!("{what}: weight {w} is not positive")));
    }
    Ok(())
}

impl<S: Scalar> MssvipProblem<S> {
    pub fn new(
        sources: Vec<(ProjectableSet<S>, VectorField<S>)>,
        targets: Vec<(ProjectableSet<S>, VectorField<S>)>,
        a: LinearMap<S>,
        alpha_weights: Vec<S>,
        beta_weights: Vec<S>,
    ) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::InvalidProblem("MSSVIP needs at least one source set".into()));
        }
        for (c, f) in &sources {
            check_dim("MSSVIP source set", a.cols(), c.dim())?;
            check_dim("MSSVIP source field", a.cols(), f.dim())?;
        }
        for (q, g) in &targets {
            check_dim("MSSVIP target set", a.rows(), q.dim())?;
            check_dim("MSSVIP target field", a.rows(), g.dim())?;
        }
        check_weights(&alpha_weights, sources.len(), "source weights")?;
        check_weights(&beta_weights, targets.len(), "target weights")?;
        Ok(Self {
            sources,
            targets,
            a,
            alpha_weights,
            beta_weights,
        })
    }

    pub fn sources(&self) -> &[(ProjectableSet<S>, VectorField<S>)] {
        &self.sources
    }

    pub fn targets(&self) -> &[(ProjectableSet<S>, VectorField<S>)] {
        &self.targets
    }

    pub fn a(&self) -> &LinearMap<S> {
        &self.a
    }

    pub fn alpha_weights(&self) -> &[S] {
        &self.alpha_weights
    }

    pub fn beta_weights(&self) -> &[S] {
        &self.beta_weights
    }

    pub fn source_dim(&self) -> usize {
        self.a.cols()
    }
}

/// The simultaneous method with validated `λ` and `γ`.
#[derive(Debug, Clone)]
pub struct MssvipSolver<'a, S> {
    problem: &'a MssvipProblem<S>,
    steps: ResolvedSteps<S>,
    tol: S,
    max_iter: usize,
    reference: Option<Vector<S>>,
}

impl<'a, S: Scalar> MssvipSolver<'a, S> {
    /// `λ` is checked against the smallest ISM constant of all fields and `γ`
    /// against `L = Σαᵢ + Σβⱼ‖A‖²`.
    pub fn new(problem: &'a MssvipProblem<S>, cfg: &SplitConfig<S>) -> Result<Self> {
        check_tol(cfg.tol)?;
        let mut ism = IsmConstant::Unbounded;
        let mut role = String::from("f_1");
        let fields = problem
            .sources
            .iter()
            .enumerate()
            .map(|(i, (_, f))| (format!("f_{}", i + 1), f))
            .chain(
                problem
                    .targets
                    .iter()
                    .enumerate()
                    .map(|(j, (_, g))| (format!("g_{}", j + 1), g)),
            );
        for (name, field) in fields {
            let next = ism.min(field.ism());
            if next != ism {
                role = name;
                ism = next;
            }
            if ism.value().is_none() {
                break;
            }
        }
        let (lambda, lambda_defaulted) = resolve_lambda(cfg.lambda, ism, &role)?;

        let alpha_sum: S = problem.alpha_weights.iter().copied().sum();
        let (bound, spectral) = if problem.targets.is_empty() {
            (alpha_sum, None)
        } else {
            let spectral = problem.a.spectral_radius();
            let beta_sum: S = problem.beta_weights.iter().copied().sum();
            (alpha_sum + beta_sum * spectral.safe_upper_bound(), Some(spectral))
        };
        let (gamma, gamma_defaulted) = resolve_gamma(cfg.gamma, cfg.gamma_safety, bound)?;
        Ok(Self {
            problem,
            steps: ResolvedSteps {
                lambda,
                gamma,
                lipschitz_bound: bound,
                spectral,
                lambda_defaulted,
                gamma_defaulted,
            },
            tol: cfg.tol,
            max_iter: cfg.max_iter,
            reference: None,
        })
    }

    pub fn with_reference(mut self, z: Vector<S>) -> Result<Self> {
        check_dim("reference solution", self.problem.source_dim(), z.dim())?;
        self.reference = Some(z);
        Ok(self)
    }

    pub fn steps(&self) -> &ResolvedSteps<S> {
        &self.steps
    }

    fn map<'b>(&self, pair: &'b (ProjectableSet<S>, VectorField<S>)) -> ForwardBackwardMap<'b, S, ProjectableSet<S>> {
        ForwardBackwardMap::new(&pair.0, &pair.1, self.steps.lambda).expect("validated at construction")
    }

    pub fn step(&self, x: &Vector<S>) -> Result<Vector<S>> {
        check_dim("mssvip_step", self.problem.source_dim(), x.dim())?;
        Ok(self.step_unchecked(x))
    }

    fn step_unchecked(&self, x: &Vector<S>) -> Vector<S> {
        let p = self.problem;
        let mut direction = Vector::zeros(x.dim());
        for (pair, &w) in p.sources.iter().zip(&p.alpha_weights) {
            let d = &self.map(pair).apply_unchecked(x) - x;
            direction = direction.add_scaled(w, &d);
        }
        if !p.targets.is_empty() {
            let ax = p.a.apply_unchecked(x);
            let mut gap = Vector::zeros(ax.dim());
            for (pair, &w) in p.targets.iter().zip(&p.beta_weights) {
                let d = &self.map(pair).apply_unchecked(&ax) - &ax;
                gap = gap.add_scaled(w, &d);
            }
            direction = &direction + &p.a.apply_adjoint_unchecked(&gap);
        }
        x.add_scaled(self.steps.gamma, &direction)
    }

    /// Largest fixed-point residual over the source maps, and over the target maps
    /// evaluated at `Ax` (zero when there are none).
    pub fn residuals(&self, x: &Vector<S>) -> (S, S) {
        let p = self.problem;
        let primary = p
            .sources
            .iter()
            .map(|pair| self.map(pair).residual_unchecked(x))
            .fold(S::zero(), S::max);
        if p.targets.is_empty() {
            return (primary, S::zero());
        }
        let ax = p.a.apply_unchecked(x);
        let split = p
            .targets
            .iter()
            .map(|pair| self.map(pair).residual_unchecked(&ax))
            .fold(S::zero(), S::max);
        (primary, split)
    }

    pub fn solve(&self, x0: Vector<S>) -> Result<SolveReport<S>> {
        check_dim("solve_mssvip start", self.problem.source_dim(), x0.dim())?;
        drive(
            x0,
            self.tol,
            self.max_iter,
            self.reference.as_ref(),
            |_, x| Advance {
                next: self.step_unchecked(x),
                mid: None,
            },
            |x| self.residuals(x),
        )
    }
}

/// `x + γ(Σαᵢ(Uᵢ − I)x + Σβⱼ Aᵀ(Tⱼ − I)(Ax))`.
pub fn mssvip_step<S: Scalar>(p: &MssvipProblem<S>, cfg: &SplitConfig<S>, x: &Vector<S>) -> Result<Vector<S>> {
    MssvipSolver::new(p, cfg)?.step(x)
}

pub fn solve_mssvip<S: Scalar>(p: &MssvipProblem<S>, cfg: &SplitConfig<S>, x0: Vector<S>) -> Result<SolveReport<S>> {
    MssvipSolver::new(p, cfg)?.solve(x0)
}
