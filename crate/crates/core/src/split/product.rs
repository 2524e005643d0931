//! The split problem as a constrained VIP on `Rⁿ × Rᵐ`: solve the VIP for
//! `h(x, y) = (f(x), g(y))` on `D = C × Q`, constrained to the graph
//! `V = {(x, y) : Ax = y}`.

use crate::cvip::{CvipConfig, CvipProblem, CvipSolver};
use crate::error::{check_dim, Result};
use crate::linalg::{LinearMap, Vector};
use crate::operators::{vip_residual, VectorField};
use crate::report::SolveReport;
use crate::scalar::Scalar;
use crate::sets::{ConvexProjector, ProductSet};

use super::direct::SvipProblem;

/// The graph `{(x, y) : Ax = y}` of a linear map, as a projectable subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSubspace<S> {
    a: LinearMap<S>,
}

impl<S: Scalar> GraphSubspace<S> {
    pub fn new(a: LinearMap<S>) -> Self {
        Self { a }
    }

    pub fn map(&self) -> &LinearMap<S> {
        &self.a
    }
}

impl<S: Scalar> ConvexProjector<S> for GraphSubspace<S> {
    fn dim(&self) -> usize {
        self.a.cols() + self.a.rows()
    }

    fn project_unchecked(&self, xy: &Vector<S>) -> Vector<S> {
        let parts = xy.split_blocks(&[self.a.cols(), self.a.rows()]);
        let (u, v) = graph_projection(&self.a, &parts[0], &parts[1]);
        Vector::concat(&[&u, &v])
    }
}

/// Nearest point of the graph of `A` to `(x, y)`:
/// `u = (I + AᵀA)⁻¹(x + Aᵀy)`, `v = Au`.
pub fn project_onto_graph<S: Scalar>(
    a: &LinearMap<S>,
    x: &Vector<S>,
    y: &Vector<S>,
) -> Result<(Vector<S>, Vector<S>)> {
    check_dim("project_onto_graph x", a.cols(), x.dim())?;
    check_dim("project_onto_graph y", a.rows(), y.dim())?;
    Ok(graph_projection(a, x, y))
}

fn graph_projection<S: Scalar>(a: &LinearMap<S>, x: &Vector<S>, y: &Vector<S>) -> (Vector<S>, Vector<S>) {
    // u = x + (I + AᵀA)⁻¹Aᵀ(y − Ax)
    let gap = y - &a.apply_unchecked(x);
    let correction = a
        .solve_regularized_normal(&a.apply_adjoint_unchecked(&gap))
        .expect("I + AᵀA is positive definite");
    let u = x + &correction;
    let v = a.apply_unchecked(&u);
    (u, v)
}

/// A split problem lifted to the product space, with the block sizes needed
/// to move between `(x, y)` and the stacked vector.
#[derive(Debug)]
pub struct ProductCvip<S> {
    pub problem: CvipProblem<S>,
    pub source_dim: usize,
    pub target_dim: usize,
}

impl<S: Scalar> ProductCvip<S> {
    pub fn join(&self, x: &Vector<S>, y: &Vector<S>) -> Result<Vector<S>> {
        check_dim("product x block", self.source_dim, x.dim())?;
        check_dim("product y block", self.target_dim, y.dim())?;
        Ok(Vector::concat(&[x, y]))
    }

    pub fn split(&self, xy: &Vector<S>) -> (Vector<S>, Vector<S>) {
        let mut parts = xy.split_blocks(&[self.source_dim, self.target_dim]);
        let y = parts.pop().expect("two blocks");
        let x = parts.pop().expect("two blocks");
        (x, y)
    }
}

/// Builds `D = C × Q`, `Ω = V` and `h = (f, g)` with `κ = max{κ₁, κ₂}`.
pub fn build_product_cvip<S: Scalar>(p: &SvipProblem<S>) -> ProductCvip<S> {
    let d = ProductSet::new(vec![p.c().clone(), p.q().clone()]).expect("two blocks");
    let h = VectorField::block_diagonal(&[p.f(), p.g()]).expect("two blocks");
    let problem = CvipProblem::new(d, GraphSubspace::new(p.a().clone()), h)
        .expect("block dimensions agree by construction");
    ProductCvip {
        problem,
        source_dim: p.source_dim(),
        target_dim: p.target_dim(),
    }
}

/// Outcome of the product-space solve, unpacked into the original spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductReport<S> {
    /// Trace of the product iteration: `res_primary` is the VIP residual on
    /// `D`, `res_split` the distance to `V`.
    pub report: SolveReport<S>,
    pub x: Vector<S>,
    pub y: Vector<S>,
    /// `vip_residual(C, f, λ̄, x)`.
    pub residual_c: S,
    /// `vip_residual(Q, g, λ̄, Ax)`.
    pub residual_q: S,
    /// `‖Ax − y‖`.
    pub coupling_gap: S,
    pub residual_lambda: S,
}

/// Runs the extragradient method on the lifted problem from `(x0, y0)`;
/// `y0` defaults to `Ax0`.
pub fn solve_svip_product<S: Scalar>(
    p: &SvipProblem<S>,
    cfg: &CvipConfig<S>,
    x0: Vector<S>,
    y0: Option<Vector<S>>,
) -> Result<ProductReport<S>> {
    solve_svip_product_with_reference(p, cfg, x0, y0, None)
}

/// As [`solve_svip_product`], tracing the distance to a known solution `x*`
/// (lifted to `(x*, Ax*)`).
pub fn solve_svip_product_with_reference<S: Scalar>(
    p: &SvipProblem<S>,
    cfg: &CvipConfig<S>,
    x0: Vector<S>,
    y0: Option<Vector<S>>,
    reference: Option<&Vector<S>>,
) -> Result<ProductReport<S>> {
    let lifted = build_product_cvip(p);
    let y0 = match y0 {
        Some(y) => y,
        None => p.a().apply(&x0)?,
    };
    let start = lifted.join(&x0, &y0)?;
    let mut solver = CvipSolver::new(&lifted.problem, cfg)?;
    if let Some(z) = reference {
        let az = p.a().apply(z)?;
        solver = solver.with_reference(lifted.join(z, &az)?)?;
    }
    let report = solver.solve(start)?;
    let (x, y) = lifted.split(&report.point);
    let lambda = solver.residual_lambda();
    let ax = p.a().apply(&x)?;
    Ok(ProductReport {
        residual_c: vip_residual(p.c(), p.f(), lambda, &x)?,
        residual_q: vip_residual(p.q(), p.g(), lambda, &ax)?,
        coupling_gap: ax.distance(&y),
        residual_lambda: lambda,
        report,
        x,
        y,
    })
}
