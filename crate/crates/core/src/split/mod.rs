//! Solvers for the split variational inequality problem: find `x* ∈ SOL(C, f)`
//! with `Ax* ∈ SOL(Q, g)`.
//!
//! * [`direct`]: the projected iteration `x ← U(x + γAᵀ(T − I)(Ax))` with
//!   `U = P_C(I − λf)` and `T = P_Q(I − λg)`.
//! * [`product`]: the extragradient method on `C × Q` constrained to the graph
//!   `V = {(x, y) : Ax = y}`.
//! * [`mssvip`]: the simultaneous method for several sets and operators on each side.
//!
//! The weak-convergence results behind the direct and parallel methods also
//! need the sign condition `⟨f(x), P_C(I − λf)(x) − x*⟩ ≥ 0` for all `x` and
//! every `x* ∈ SOL(C, f)` (and the analogue for each `gⱼ`). It quantifies over
//! the whole space and the solution set, so it is not checked here.

pub(crate) mod config;
pub mod direct;
pub mod mssvip;
pub mod product;

pub use config::{ResolvedSteps, SplitConfig};
pub use direct::{solve_svip_direct, svip_direct_step, DirectStep, SvipDirect, SvipProblem};
pub use mssvip::{mssvip_step, solve_mssvip, MssvipProblem, MssvipSolver};
pub use product::{
    build_product_cvip, project_onto_graph, solve_svip_product, solve_svip_product_with_reference,
    GraphSubspace, ProductCvip,
    ProductReport,
};
