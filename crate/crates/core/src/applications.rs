//! Special cases built on the core solvers: split feasibility (CQ and
//! minimum-norm), common VIP points, split minimization, split zeros and
//! convex feasibility.

use crate::cvip::CvipProblem;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{LinearMap, Vector};
use crate::operators::VectorField;
use crate::report::{drive, Advance, SolveReport};
use crate::scalar::Scalar;
use crate::sets::{ConvexProjector, ProductSet, ProjectableSet};
use crate::split::config::{check_tol, resolve_gamma};
use crate::split::{MssvipProblem, SplitConfig, SvipDirect, SvipProblem};

/// Find `x ∈ C` with `Ax ∈ Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SfpProblem<S> {
    c: ProjectableSet<S>,
    q: ProjectableSet<S>,
    a: LinearMap<S>,
}

impl<S: Scalar> SfpProblem<S> {
    pub fn new(c: ProjectableSet<S>, q: ProjectableSet<S>, a: LinearMap<S>) -> Result<Self> {
        check_dim("SFP set C", a.cols(), c.dim())?;
        check_dim("SFP set Q", a.rows(), q.dim())?;
        Ok(Self { c, q, a })
    }

    pub fn c(&self) -> &ProjectableSet<S> {
        &self.c
    }

    pub fn q(&self) -> &ProjectableSet<S> {
        &self.q
    }

    pub fn a(&self) -> &LinearMap<S> {
        &self.a
    }

    /// The same problem as a split VIP with the given fields.
    pub fn with_fields(&self, f: VectorField<S>, g: VectorField<S>) -> Result<SvipProblem<S>> {
        SvipProblem::new(self.c.clone(), self.q.clone(), f, g, self.a.clone())
    }

    /// The split VIP with `f = g = 0`.
    pub fn to_svip(&self) -> SvipProblem<S> {
        self.with_fields(
            VectorField::zero(self.a.cols()),
            VectorField::zero(self.a.rows()),
        )
        .expect("dimensions checked at construction")
    }
}

/// The CQ algorithm `x ← P_C(x + γAᵀ(P_Q − I)Ax)`.
#[derive(Debug, Clone)]
pub struct CqSolver<'a, S> {
    problem: &'a SfpProblem<S>,
    gamma: S,
    lipschitz_bound: S,
    tol: S,
    max_iter: usize,
    reference: Option<Vector<S>>,
}

impl<'a, S: Scalar> CqSolver<'a, S> {
    /// `gamma = None` picks `0.9/L̂`; an explicit `γ` must satisfy `γL̂ < 1`.
    pub fn new(problem: &'a SfpProblem<S>, gamma: Option<S>, tol: S, max_iter: usize) -> Result<Self> {
        check_tol(tol)?;
        let bound = problem.a.spectral_radius().safe_upper_bound();
        let (gamma, _) = resolve_gamma(gamma, S::lit(0.9), bound)?;
        Ok(Self {
            problem,
            gamma,
            lipschitz_bound: bound,
            tol,
            max_iter,
            reference: None,
        })
    }

    pub fn with_reference(mut self, z: Vector<S>) -> Result<Self> {
        check_dim("reference solution", self.problem.a.cols(), z.dim())?;
        self.reference = Some(z);
        Ok(self)
    }

    pub fn gamma(&self) -> S {
        self.gamma
    }

    pub fn lipschitz_bound(&self) -> S {
        self.lipschitz_bound
    }

    pub fn step(&self, x: &Vector<S>) -> Result<Vector<S>> {
        check_dim("CQ step", self.problem.a.cols(), x.dim())?;
        Ok(self.step_unchecked(x))
    }

    fn step_unchecked(&self, x: &Vector<S>) -> Vector<S> {
        let p = self.problem;
        let ax = p.a.apply_unchecked(x);
        let gap = &p.q.project_unchecked(&ax) - &ax;
        let moved = x.add_scaled(self.gamma, &p.a.apply_adjoint_unchecked(&gap));
        p.c.project_unchecked(&moved)
    }

    /// `(‖x − P_C x‖, ‖Ax − P_Q(Ax)‖)`.
    pub fn residuals(&self, x: &Vector<S>) -> (S, S) {
        let p = self.problem;
        let ax = p.a.apply_unchecked(x);
        (
            x.distance(&p.c.project_unchecked(x)),
            ax.distance(&p.q.project_unchecked(&ax)),
        )
    }

    pub fn solve(&self, x0: Vector<S>) -> Result<SolveReport<S>> {
        check_dim("CQ start", self.problem.a.cols(), x0.dim())?;
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

pub fn solve_sfp_cq<S: Scalar>(
    p: &SfpProblem<S>,
    gamma: Option<S>,
    tol: S,
    max_iter: usize,
    x0: Vector<S>,
) -> Result<SolveReport<S>> {
    CqSolver::new(p, gamma, tol, max_iter)?.solve(x0)
}

/// The split VIP with `f = I`, `g = 0`, whose solution is the minimum-norm
/// point of `C ∩ A⁻¹(Q)`.
pub fn min_norm_svip<S: Scalar>(p: &SfpProblem<S>) -> SvipProblem<S> {
    p.with_fields(
        VectorField::identity(p.a.cols()),
        VectorField::zero(p.a.rows()),
    )
    .expect("dimensions checked at construction")
}

pub fn solve_sfp_min_norm<S: Scalar>(
    p: &SfpProblem<S>,
    cfg: &SplitConfig<S>,
    x0: Vector<S>,
) -> Result<SolveReport<S>> {
    let svip = min_norm_svip(p);
    SvipDirect::new(&svip, cfg)?.solve(x0)
}

/// `Δ = {(a, …, a)}` in `(Rⁿ)ᵖ`; the projection replaces every block by the
/// block average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalSubspace {
    blocks: usize,
    block_dim: usize,
}

impl DiagonalSubspace {
    pub fn new(blocks: usize, block_dim: usize) -> Result<Self> {
        if blocks == 0 {
            return Err(Error::InvalidSet("diagonal of zero blocks".into()));
        }
        Ok(Self { blocks, block_dim })
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }
}

impl<S: Scalar> ConvexProjector<S> for DiagonalSubspace {
    fn dim(&self) -> usize {
        self.blocks * self.block_dim
    }

    fn project_unchecked(&self, x: &Vector<S>) -> Vector<S> {
        let n = self.block_dim;
        let count = S::from_usize(self.blocks).expect("block count fits the scalar type");
        let mean: Vec<S> = (0..n)
            .map(|i| (0..self.blocks).map(|b| x[b * n + i]).sum::<S>() / count)
            .collect();
        let data = (0..self.blocks).flat_map(|_| mean.iter().copied()).collect();
        Vector::from_vec_unchecked(data)
    }
}

/// The common VIP point problem as a CVIP on `(Rⁿ)ᵖ`: `C' = ΠCᵢ`, `Ω = Δ`,
/// `F(x₁, …, x_p) = (f₁(x₁), …, f_p(x_p))`.
pub fn build_cvipp<S: Scalar>(fields: Vec<VectorField<S>>, sets: Vec<ProjectableSet<S>>) -> Result<CvipProblem<S>> {
    if fields.is_empty() || fields.len() != sets.len() {
        return Err(Error::InvalidProblem(format!(
            "CVIPP needs matching non-empty lists, got {} fields and {} sets",
            fields.len(),
            sets.len()
        )));
    }
    let n = sets[0].dim();
    for (f, c) in fields.iter().zip(&sets) {
        check_dim("CVIPP set", n, c.dim())?;
        check_dim("CVIPP field", n, f.dim())?;
    }
    let blocks = sets.len();
    let field = VectorField::block_diagonal(&fields.iter().collect::<Vec<_>>())?;
    CvipProblem::new(ProductSet::new(sets)?, DiagonalSubspace::new(blocks, n)?, field)
}

/// Quadratic `½xᵀMx + qᵀx` given by `(M, q)`.
pub type Quadratic<S> = (LinearMap<S>, Vector<S>);

fn gradient_field<S: Scalar>((m, q): Quadratic<S>) -> Result<VectorField<S>> {
    let constant = m.frobenius_norm_squared() == S::zero();
    if constant && q.norm_squared() == S::zero() {
        if !m.is_square() {
            return Err(Error::InvalidField("quadratic needs a square matrix".into()));
        }
        check_dim("quadratic offset", m.rows(), q.dim())?;
        return Ok(VectorField::zero(q.dim()));
    }
    VectorField::affine(m, q)
}

/// Split minimization of convex quadratics `F` on `C` and `G` on `Q`, as the
/// split VIP with `f = ∇F`, `g = ∇G`.
pub fn build_smp<S: Scalar>(
    f: Quadratic<S>,
    g: Quadratic<S>,
    c: ProjectableSet<S>,
    q: ProjectableSet<S>,
    a: LinearMap<S>,
) -> Result<SvipProblem<S>> {
    SvipProblem::new(c, q, gradient_field(f)?, gradient_field(g)?, a)
}

/// Find `x` with `B₁(x) = 0` and `B₂(Ax) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SzpProblem<S> {
    b1: VectorField<S>,
    b2: VectorField<S>,
    a: LinearMap<S>,
}

impl<S: Scalar> SzpProblem<S> {
    pub fn new(b1: VectorField<S>, b2: VectorField<S>, a: LinearMap<S>) -> Result<Self> {
        check_dim("SZP operator B1", a.cols(), b1.dim())?;
        check_dim("SZP operator B2", a.rows(), b2.dim())?;
        for (name, b) in [("B1", &b1), ("B2", &b2)] {
            if b.ism().value().is_none() {
                return Err(Error::InvalidField(format!(
                    "{name} has no inverse-strong-monotonicity constant"
                )));
            }
        }
        Ok(Self { b1, b2, a })
    }

    pub fn b1(&self) -> &VectorField<S> {
        &self.b1
    }

    pub fn b2(&self) -> &VectorField<S> {
        &self.b2
    }

    pub fn a(&self) -> &LinearMap<S> {
        &self.a
    }

    /// The split VIP with `C = Rⁿ`, `Q = Rᵐ`, `f = B₁`, `g = B₂`.
    pub fn to_svip(&self) -> SvipProblem<S> {
        SvipProblem::new(
            ProjectableSet::whole_space(self.a.cols()),
            ProjectableSet::whole_space(self.a.rows()),
            self.b1.clone(),
            self.b2.clone(),
            self.a.clone(),
        )
        .expect("dimensions checked at construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SzpCheck<S> {
    pub is_solution: bool,
    pub b1_norm: S,
    pub b2_norm: S,
}

pub fn check_szp<S: Scalar>(p: &SzpProblem<S>, x: &Vector<S>, tol: S) -> Result<SzpCheck<S>> {
    let b1_norm = p.b1.evaluate(x)?.norm();
    let b2_norm = p.b2.evaluate(&p.a.apply(x)?)?.norm();
    Ok(SzpCheck {
        is_solution: b1_norm <= tol && b2_norm <= tol,
        b1_norm,
        b2_norm,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SzpOutcome<S> {
    pub report: SolveReport<S>,
    /// [`check_szp`] of the final point at `10·tol`.
    pub check: SzpCheck<S>,
}

/// Runs the direct split solver on [`SzpProblem::to_svip`]. On the whole space
/// the residuals are `λ‖B₁(x)‖` and `λ‖B₂(Ax)‖`, so the stopping tolerance is
/// scaled by `λ` to make convergence certify `‖Bᵢ‖ ≤ tol`.
pub fn solve_szp<S: Scalar>(p: &SzpProblem<S>, cfg: &SplitConfig<S>, x0: Vector<S>) -> Result<SzpOutcome<S>> {
    solve_szp_with_reference(p, cfg, x0, None)
}

/// As [`solve_szp`], tracing the distance to a known zero `z`.
pub fn solve_szp_with_reference<S: Scalar>(
    p: &SzpProblem<S>,
    cfg: &SplitConfig<S>,
    x0: Vector<S>,
    reference: Option<&Vector<S>>,
) -> Result<SzpOutcome<S>> {
    let svip = p.to_svip();
    let lambda = SvipDirect::new(&svip, cfg)?.steps().lambda;
    let scaled = SplitConfig {
        lambda: Some(lambda),
        tol: cfg.tol * lambda,
        ..cfg.clone()
    };
    let mut solver = SvipDirect::new(&svip, &scaled)?;
    if let Some(z) = reference {
        solver = solver.with_reference(z.clone())?;
    }
    let report = solver.solve(x0)?;
    let check = check_szp(p, &report.point, S::lit(10.0) * cfg.tol)?;
    Ok(SzpOutcome { report, check })
}

/// Convex feasibility `x ∈ ∩Cᵢ` as the parallel split method with no target
/// sets, zero fields and unit weights.
pub fn cfp_problem<S: Scalar>(sets: Vec<ProjectableSet<S>>) -> Result<MssvipProblem<S>> {
    let n = sets
        .first()
        .map(ConvexProjector::dim)
        .ok_or_else(|| Error::InvalidProblem("feasibility needs at least one set".into()))?;
    let weights = vec![S::one(); sets.len()];
    let sources = sets
        .into_iter()
        .map(|c| (c, VectorField::zero(n)))
        .collect();
    MssvipProblem::new(sources, vec![], LinearMap::identity(n), weights, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvip::{CvipConfig, Schedule, solve_cvip};
    use crate::split::solve_svip_direct;
    use crate::split::solve_mssvip;

    fn v(data: &[f64]) -> Vector<f64> {
        Vector::from_f64(data).unwrap()
    }

    fn interval(lo: f64, hi: f64) -> ProjectableSet<f64> {
        ProjectableSet::box_set(v(&[lo]), v(&[hi])).unwrap()
    }

    fn scalar_sfp() -> SfpProblem<f64> {
        SfpProblem::new(interval(0.0, 1.0), interval(2.0, 3.0), LinearMap::diagonal(&[2.0])).unwrap()
    }

    #[test]
    fn cq_hand_trace_and_limit() {
        let p = scalar_sfp();
        let solver = CqSolver::new(&p, Some(0.2), 1e-9, 500).unwrap();
        assert_eq!(solver.step(&v(&[0.0])).unwrap(), v(&[0.8]));
        let r = solver.solve(v(&[0.0])).unwrap();
        assert!(r.converged());
        assert!((r.point[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cq_feasible_start_is_fixed() {
        let r = solve_sfp_cq(&scalar_sfp(), None, 1e-9, 100, v(&[1.0])).unwrap();
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn cq_matches_direct_with_zero_fields() {
        let p = scalar_sfp();
        let cq = solve_sfp_cq(&p, Some(0.2), 1e-12, 60, v(&[-3.0])).unwrap();
        let cfg = SplitConfig::default().with_gamma(0.2).with_tol(1e-12).with_max_iter(60);
        let direct = solve_svip_direct(&p.to_svip(), &cfg, v(&[-3.0])).unwrap();
        assert_eq!(cq.iterations, direct.iterations);
        assert_eq!(cq.point, direct.point);
    }

    #[test]
    fn cq_rejects_large_gamma() {
        let err = CqSolver::new(&scalar_sfp(), Some(0.25), 1e-9, 10).unwrap_err();
        assert!(err.to_string().contains("γ ≥ 1/L"), "{err}");
    }

    #[test]
    fn min_norm_box_ball_and_origin() {
        let whole = ProjectableSet::whole_space(2);
        let id = LinearMap::identity(2);
        let cfg = SplitConfig::default().with_tol(1e-10);
        let start = v(&[4.0, -3.0]);

        let boxed = ProjectableSet::box_set(v(&[1.0, -5.0]), v(&[2.0, 5.0])).unwrap();
        let p = SfpProblem::new(boxed, whole.clone(), id.clone()).unwrap();
        let r = solve_sfp_min_norm(&p, &cfg, start.clone()).unwrap();
        assert!(r.converged());
        assert!(r.point.distance(&v(&[1.0, 0.0])) < 1e-4);

        let ball = ProjectableSet::ball(v(&[3.0, 0.0]), 1.0).unwrap();
        let p = SfpProblem::new(ball, whole.clone(), id.clone()).unwrap();
        let r = solve_sfp_min_norm(&p, &cfg, start.clone()).unwrap();
        assert!(r.point.distance(&v(&[2.0, 0.0])) < 1e-4);

        let around = ProjectableSet::ball(v(&[0.5, 0.5]), 1.0).unwrap();
        let p = SfpProblem::new(around, whole, id).unwrap();
        let r = solve_sfp_min_norm(&p, &cfg, start).unwrap();
        assert!(r.point.norm() < 1e-6);
    }

    #[test]
    fn diagonal_projection_is_block_average() {
        let d = DiagonalSubspace::new(2, 2).unwrap();
        let p = d.project(&v(&[1.0, 1.0, 3.0, 3.0])).unwrap();
        assert_eq!(p, v(&[2.0, 2.0, 2.0, 2.0]));
        let single = DiagonalSubspace::new(1, 3).unwrap();
        let x = v(&[1.0, -2.0, 5.0]);
        assert_eq!(single.project(&x).unwrap(), x);
    }

    #[test]
    fn cvipp_on_overlapping_intervals() {
        let eps = || VectorField::affine(LinearMap::diagonal(&[1e-9]), v(&[0.0])).unwrap();
        let p = build_cvipp(vec![eps(), eps()], vec![interval(0.0, 2.0), interval(1.0, 3.0)]).unwrap();
        let cfg = CvipConfig {
            lambda: Some(Schedule::Constant(1.0)),
            ..CvipConfig::default()
        };
        let r = solve_cvip(&p, &cfg, v(&[-4.0, 6.0])).unwrap();
        assert!(r.converged());
        let (a, b) = (r.point[0], r.point[1]);
        assert!((a - b).abs() < 1e-6);
        assert!((1.0 - 1e-6..=2.0 + 1e-6).contains(&a));
    }

    #[test]
    fn cvipp_rejects_mismatched_lists() {
        assert!(build_cvipp(vec![VectorField::<f64>::identity(1)], vec![]).is_err());
    }

    #[test]
    fn smp_with_interior_minimizers() {
        let quad = |c: f64| (LinearMap::identity(1), v(&[-c]));
        let p = build_smp(
            quad(7.0),
            quad(14.0),
            interval(0.0, 10.0),
            interval(0.0, 100.0),
            LinearMap::diagonal(&[2.0]),
        )
        .unwrap();
        let r = solve_svip_direct(&p, &SplitConfig::default().with_tol(1e-10), v(&[0.0])).unwrap();
        assert!(r.converged());
        assert!((r.point[0] - 7.0).abs() < 1e-5);
    }

    #[test]
    fn smp_projection_characterization() {
        // F = ½‖x − c‖² on C is minimized at P_C(c).
        let c = v(&[3.0, -4.0]);
        let set = ProjectableSet::box_set(v(&[0.0, 0.0]), v(&[1.0, 1.0])).unwrap();
        let p = build_smp(
            (LinearMap::identity(2), -&c),
            (LinearMap::zeros(2, 2), v(&[0.0, 0.0])),
            set.clone(),
            ProjectableSet::whole_space(2),
            LinearMap::identity(2),
        )
        .unwrap();
        assert!(p.g().is_zero());
        let r = solve_svip_direct(&p, &SplitConfig::default().with_tol(1e-10), v(&[0.5, 0.5])).unwrap();
        assert!(r.point.distance(&set.project(&c).unwrap()) < 1e-6);
    }

    #[test]
    fn smp_rejects_indefinite_quadratic() {
        let err = build_smp(
            (LinearMap::diagonal(&[-1.0]), v(&[0.0])),
            (LinearMap::zeros(1, 1), v(&[0.0])),
            interval(0.0, 1.0),
            interval(0.0, 1.0),
            LinearMap::identity(1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidField(_)));
    }

    #[test]
    fn szp_checks() {
        let a = LinearMap::from_f64_rows(&[vec![1.0, 2.0]]).unwrap();
        let p = SzpProblem::new(VectorField::identity(2), VectorField::zero(1), a.clone()).unwrap();
        assert!(check_szp(&p, &v(&[0.0, 0.0]), 1e-12).unwrap().is_solution);
        assert!(!check_szp(&p, &v(&[1e-3, 0.0]), 1e-6).unwrap().is_solution);

        let shifted = VectorField::affine(LinearMap::identity(2), v(&[-1.0, 0.0])).unwrap();
        let p = SzpProblem::new(shifted, VectorField::zero(1), a).unwrap();
        let c = check_szp(&p, &v(&[1.0, 0.0]), 1e-12).unwrap();
        assert!(c.is_solution && c.b1_norm == 0.0 && c.b2_norm == 0.0);
    }

    #[test]
    fn szp_solve_is_sound() {
        let shifted = VectorField::affine(LinearMap::identity(2), v(&[-1.0, 0.0])).unwrap();
        let p = SzpProblem::new(shifted, VectorField::zero(1), LinearMap::from_f64_rows(&[vec![1.0, 1.0]]).unwrap())
            .unwrap();
        let out = solve_szp(&p, &SplitConfig::default(), v(&[5.0, 5.0])).unwrap();
        assert!(out.report.converged());
        assert!(out.check.is_solution);
        assert!(out.report.point.distance(&v(&[1.0, 0.0])) < 1e-7);
    }

    #[test]
    fn szp_infeasible_instance_fails() {
        // B₂(Ax) = (x, −1) never vanishes.
        let b2 = VectorField::affine(LinearMap::identity(2), v(&[0.0, -1.0])).unwrap();
        let a = LinearMap::from_f64_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let p = SzpProblem::new(VectorField::zero(1), b2, a).unwrap();
        let out = solve_szp(&p, &SplitConfig::default().with_max_iter(200), v(&[3.0])).unwrap();
        assert!(!out.report.converged());
        assert!(!out.check.is_solution);
        assert!(out.check.b2_norm >= 1.0);
    }

    #[test]
    fn szp_requires_ism_operators() {
        let skew = LinearMap::from_f64_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let b1 = VectorField::affine_with_lipschitz(skew, v(&[0.0, 0.0]), 1.0).unwrap();
        assert!(SzpProblem::new(b1, VectorField::zero(2), LinearMap::identity(2)).is_err());
    }

    #[test]
    fn cfp_of_three_boxes() {
        let boxes = vec![
            interval(0.0, 5.0),
            interval(2.0, 7.0),
            interval(-1.0, 3.0),
        ];
        let p = cfp_problem(boxes.clone()).unwrap();
        let r = solve_mssvip(&p, &SplitConfig::default().with_tol(1e-10), v(&[10.0])).unwrap();
        assert!(r.converged());
        assert!(boxes.iter().all(|c| c.distance(&r.point).unwrap() <= 1e-6));
        assert!(cfp_problem::<f64>(vec![]).is_err());
    }
}
