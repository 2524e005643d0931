//! Projection methods for variational inequalities and their split variants.
//!
//! * [`cvip`]: the extragradient method with half-space cuts for a VIP on `C`
//!   whose solution must also lie in `Ω`.
//! * [`split`]: the direct, product-space and multiple-set solvers for split VIPs.
//! * [`applications`]: split feasibility (CQ, minimum norm), common VIP points,
//!   split minimization, split zeros and convex feasibility.
//! * [`cli`]: TOML problem files, JSON reports and CSV traces.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `…F64`
//! aliases below name the common instantiations.
//!
//! ```
//! use splitvi::{LinearMapF64, ProjectableSetF64, SplitConfig, SvipProblem, VectorF64, VectorFieldF64};
//!
//! let interval = |lo: f64, hi: f64| {
//!     ProjectableSetF64::box_set(VectorF64::from_slice(&[lo]).unwrap(), VectorF64::from_slice(&[hi]).unwrap())
//!         .unwrap()
//! };
//! let p = SvipProblem::new(
//!     interval(0.0, 1.0),
//!     interval(2.0, 3.0),
//!     VectorFieldF64::zero(1),
//!     VectorFieldF64::zero(1),
//!     LinearMapF64::diagonal(&[2.0]),
//! )
//! .unwrap();
//! let cfg = SplitConfig::default().with_gamma(0.2);
//! let report = splitvi::solve_svip_direct(&p, &cfg, VectorF64::zeros(1)).unwrap();
//! assert!(report.converged());
//! assert!((report.point[0] - 1.0).abs() < 1e-6);
//! ```

pub mod applications;
pub mod cli;
pub mod cvip;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod sets;
pub mod split;

pub use applications::{
    build_cvipp, build_smp, cfp_problem, check_szp, solve_sfp_cq, solve_sfp_min_norm, solve_szp,
    CqSolver, DiagonalSubspace, SfpProblem, SzpCheck, SzpProblem,
};
pub use cvip::{cvip_step, solve_cvip, CvipConfig, CvipProblem, CvipSolver, Schedule};
pub use error::{ConfigViolation, Error, Result};
pub use linalg::{LinearMap, SpectralEstimate, Vector};
pub use operators::{vip_residual, ForwardBackwardMap, IsmConstant, VectorField};
pub use report::{IterationRecord, SolveReport, Status};
pub use scalar::Scalar;
pub use sets::{supporting_halfspace, ConvexProjector, HalfSpaceCut, ProductSet, ProjectableSet};
pub use split::{
    build_product_cvip, mssvip_step, project_onto_graph, solve_mssvip, solve_svip_direct,
    solve_svip_product, svip_direct_step, MssvipProblem, SplitConfig, SvipProblem,
};

pub type VectorF64 = Vector<f64>;
pub type VectorF32 = Vector<f32>;
pub type LinearMapF64 = LinearMap<f64>;
pub type LinearMapF32 = LinearMap<f32>;
pub type ProjectableSetF64 = ProjectableSet<f64>;
pub type ProjectableSetF32 = ProjectableSet<f32>;
pub type VectorFieldF64 = VectorField<f64>;
pub type VectorFieldF32 = VectorField<f32>;
pub type SolveReportF64 = SolveReport<f64>;
pub type SvipProblemF64 = SvipProblem<f64>;
pub type CvipProblemF64 = CvipProblem<f64>;
