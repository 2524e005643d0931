//! Turning a [`ProblemFile`] into typed problems and solver settings.

use crate::applications::{
    build_cvipp, build_smp, min_norm_svip, solve_szp_with_reference, CqSolver, SfpProblem,
    SzpCheck, SzpProblem,
};
use crate::cvip::{CvipConfig, CvipProblem, CvipSolver, Schedule};
use crate::error::Error;
use crate::linalg::{LinearMap, SpectralEstimate, Vector};
use crate::operators::VectorField;
use crate::report::{SolveReport, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::sets::ProjectableSet;
use crate::split::{
    solve_svip_product_with_reference, MssvipProblem, MssvipSolver, ProductReport, SplitConfig,
    SvipDirect, SvipProblem,
};

use super::schema::{ComponentSpec, FieldSpec, Kind, ProblemFile, SetSpec};
use super::CliError;

/// A validated problem with its solver configuration.
#[derive(Debug)]
pub enum Problem {
    Cvip(CvipProblem<f64>, CvipConfig<f64>),
    SvipDirect(SvipProblem<f64>, SplitConfig<f64>),
    SvipProduct(SvipProblem<f64>, CvipConfig<f64>),
    Mssvip(MssvipProblem<f64>, SplitConfig<f64>),
    SfpCq(SfpProblem<f64>, SplitConfig<f64>),
    SfpMinNorm(SfpProblem<f64>, SplitConfig<f64>),
    Cvipp(CvipProblem<f64>, CvipConfig<f64>),
    Smp(SvipProblem<f64>, SplitConfig<f64>),
    Szp(SzpProblem<f64>, SplitConfig<f64>),
}

/// Step sizes after defaults and validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub relaxation: Option<f64>,
    /// The `L` that `γ` is checked against.
    pub lipschitz_bound: Option<f64>,
    /// Lipschitz constant of the (lifted) field for the extragradient method.
    pub kappa: Option<f64>,
    pub spectral: Option<SpectralEstimate<f64>>,
    pub tol: f64,
    pub max_iter: usize,
}

/// Output of `estimate-l`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bounds {
    pub spectral: Option<SpectralEstimate<f64>>,
    pub lipschitz_bound: Option<f64>,
    pub kappa: Option<f64>,
}

/// What a run produced beyond the solve report.
#[derive(Debug, Clone, PartialEq)]
pub enum Extra {
    None,
    Product(Box<ProductReport<f64>>),
    Szp(SzpCheck<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub report: SolveReport<f64>,
    pub extra: Extra,
}

struct Ctx<'a> {
    file: &'a ProblemFile,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

impl Ctx<'_> {
    fn m(&self) -> Result<usize, CliError> {
        self.file
            .m
            .ok_or_else(|| invalid(format!("kind {} needs the target dimension m", self.file.kind.as_str())))
    }

    fn vector(&self, name: &str, data: &[f64], dim: usize) -> Result<Vector<f64>, CliError> {
        if data.len() != dim {
            return Err(invalid(format!("{name} has length {}, expected {dim}", data.len())));
        }
        Vector::from_slice(data).map_err(|e| invalid(format!("{name}: {e}")))
    }

    fn matrix(&self, name: &str, rows: &[Vec<f64>], r: usize, c: usize) -> Result<LinearMap<f64>, CliError> {
        if rows.len() != r || rows.iter().any(|row| row.len() != c) {
            return Err(invalid(format!("{name} must be {r}×{c}")));
        }
        LinearMap::from_rows(rows).map_err(|e| invalid(format!("{name}: {e}")))
    }

    fn set(&self, name: &str, spec: &SetSpec, dim: usize) -> Result<ProjectableSet<f64>, CliError> {
        let wrap = |r: crate::error::Result<ProjectableSet<f64>>| r.map_err(|e| invalid(format!("{name}: {e}")));
        match spec {
            SetSpec::Whole => Ok(ProjectableSet::whole_space(dim)),
            SetSpec::Box { lower, upper } => wrap(ProjectableSet::box_set(
                self.vector(&format!("{name}.lower"), lower, dim)?,
                self.vector(&format!("{name}.upper"), upper, dim)?,
            )),
            SetSpec::Ball { center, radius } => wrap(ProjectableSet::ball(
                self.vector(&format!("{name}.center"), center, dim)?,
                *radius,
            )),
            SetSpec::Halfspace { normal, offset } => wrap(ProjectableSet::half_space(
                self.vector(&format!("{name}.normal"), normal, dim)?,
                *offset,
            )),
            SetSpec::Hyperplane { normal, offset } => wrap(ProjectableSet::hyperplane(
                self.vector(&format!("{name}.normal"), normal, dim)?,
                *offset,
            )),
            SetSpec::Affine { basis, anchor } => {
                let basis = basis
                    .iter()
                    .enumerate()
                    .map(|(i, b)| self.vector(&format!("{name}.basis[{i}]"), b, dim))
                    .collect::<Result<Vec<_>, _>>()?;
                wrap(ProjectableSet::affine_subspace(
                    basis,
                    self.vector(&format!("{name}.anchor"), anchor, dim)?,
                ))
            }
        }
    }

    fn field(&self, name: &str, spec: &FieldSpec, dim: usize) -> Result<VectorField<f64>, CliError> {
        match spec {
            FieldSpec::Zero => Ok(VectorField::zero(dim)),
            FieldSpec::Identity => Ok(VectorField::identity(dim)),
            FieldSpec::Affine {
                matrix,
                offset,
                lipschitz,
            } => {
                let (m, q) = self.quadratic(name, matrix, offset.as_deref(), dim)?;
                match lipschitz {
                    None => VectorField::affine(m, q),
                    Some(k) => VectorField::affine_with_lipschitz(m, q, *k),
                }
                .map_err(|e| invalid(format!("{name}: {e}")))
            }
        }
    }

    fn quadratic(
        &self,
        name: &str,
        matrix: &[Vec<f64>],
        offset: Option<&[f64]>,
        dim: usize,
    ) -> Result<(LinearMap<f64>, Vector<f64>), CliError> {
        let m = self.matrix(&format!("{name}.matrix"), matrix, dim, dim)?;
        let q = match offset {
            Some(q) => self.vector(&format!("{name}.offset"), q, dim)?,
            None => Vector::zeros(dim),
        };
        Ok((m, q))
    }

    fn required<'s, T>(&self, name: &str, value: &'s Option<T>) -> Result<&'s T, CliError> {
        value
            .as_ref()
            .ok_or_else(|| invalid(format!("kind {} needs `{name}`", self.file.kind.as_str())))
    }

    fn optional_field(&self, name: &str, value: &Option<FieldSpec>, dim: usize) -> Result<VectorField<f64>, CliError> {
        match value {
            Some(spec) => self.field(name, spec, dim),
            None => Ok(VectorField::zero(dim)),
        }
    }

    fn coupling(&self) -> Result<LinearMap<f64>, CliError> {
        let m = self.m()?;
        self.matrix("a", self.required("a", &self.file.a)?, m, self.file.n)
    }

    fn components(&self, name: &str, list: &[ComponentSpec], dim: usize) -> Result<Vec<(ProjectableSet<f64>, VectorField<f64>, f64)>, CliError> {
        list.iter()
            .enumerate()
            .map(|(i, c)| {
                let label = format!("{name}[{i}]");
                Ok((
                    self.set(&format!("{label}.set"), &c.set, dim)?,
                    self.field(&format!("{label}.field"), &c.field, dim)?,
                    c.weight,
                ))
            })
            .collect()
    }

    fn svip(&self) -> Result<SvipProblem<f64>, CliError> {
        let (n, m) = (self.file.n, self.m()?);
        SvipProblem::new(
            self.set("c", self.required("c", &self.file.c)?, n)?,
            self.set("q", self.required("q", &self.file.q)?, m)?,
            self.optional_field("f", &self.file.f, n)?,
            self.optional_field("g", &self.file.g, m)?,
            self.coupling()?,
        )
        .map_err(CliError::from_build)
    }

    fn sfp(&self) -> Result<SfpProblem<f64>, CliError> {
        let (n, m) = (self.file.n, self.m()?);
        SfpProblem::new(
            self.set("c", self.required("c", &self.file.c)?, n)?,
            self.set("q", self.required("q", &self.file.q)?, m)?,
            self.coupling()?,
        )
        .map_err(CliError::from_build)
    }

    fn split_config(&self) -> SplitConfig<f64> {
        let c = &self.file.config;
        let d = SplitConfig::default();
        SplitConfig {
            lambda: c.lambda,
            gamma: c.gamma,
            tol: c.tol.unwrap_or(DEFAULT_TOL),
            max_iter: c.max_iter.unwrap_or(DEFAULT_MAX_ITER),
            gamma_safety: c.gamma_safety.unwrap_or(d.gamma_safety),
        }
    }

    fn cvip_config(&self) -> CvipConfig<f64> {
        let c = &self.file.config;
        let d = CvipConfig::default();
        CvipConfig {
            lambda: c.lambda.map(Schedule::Constant),
            alpha: c.relaxation.map(Schedule::Constant).unwrap_or(d.alpha),
            tol: c.tol.unwrap_or(DEFAULT_TOL),
            max_iter: c.max_iter.unwrap_or(DEFAULT_MAX_ITER),
        }
    }

    fn reject_split_only_keys(&self) -> Result<(), CliError> {
        let c = &self.file.config;
        if c.gamma.is_some() || c.gamma_safety.is_some() {
            return Err(invalid(format!(
                "kind {} has no relaxation γ; remove config.gamma and config.gamma_safety",
                self.file.kind.as_str()
            )));
        }
        Ok(())
    }

    fn reject_cvip_only_keys(&self) -> Result<(), CliError> {
        if self.file.config.relaxation.is_some() {
            return Err(invalid(format!(
                "kind {} has no extragradient relaxation; remove config.relaxation",
                self.file.kind.as_str()
            )));
        }
        Ok(())
    }
}

/// Validates array shapes and builds the typed problem. Step sizes are not
/// checked here; see [`Problem::settings`].
pub fn build(file: &ProblemFile) -> Result<Problem, CliError> {
    let cx = Ctx { file };
    let n = file.n;
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if file.kind.is_split() {
        if cx.m()? == 0 {
            return Err(invalid("m must be positive"));
        }
        if file.kind != Kind::SvipProduct {
            cx.reject_cvip_only_keys()?;
        }
    } else if file.m.is_some() || file.a.is_some() {
        return Err(invalid(format!("kind {} takes no `m` or `a`", file.kind.as_str())));
    }
    if file.y0.is_some() && file.kind != Kind::SvipProduct {
        return Err(invalid("`y0` is only used by svip_product"));
    }
    let problem = match file.kind {
        Kind::Cvip => {
            cx.reject_split_only_keys()?;
            let p = CvipProblem::new(
                cx.set("c", cx.required("c", &file.c)?, n)?,
                cx.set("omega", cx.required("omega", &file.omega)?, n)?,
                cx.optional_field("f", &file.f, n)?,
            )
            .map_err(CliError::from_build)?;
            Problem::Cvip(p, cx.cvip_config())
        }
        Kind::SvipDirect => Problem::SvipDirect(cx.svip()?, cx.split_config()),
        Kind::SvipProduct => {
            cx.reject_split_only_keys()?;
            Problem::SvipProduct(cx.svip()?, cx.cvip_config())
        }
        Kind::Mssvip => {
            let m = cx.m()?;
            let sources = cx.components("sources", &file.sources, n)?;
            let targets = cx.components("targets", &file.targets, m)?;
            let (alpha, sources): (Vec<f64>, Vec<_>) = sources.into_iter().map(|(c, f, w)| (w, (c, f))).unzip();
            let (beta, targets): (Vec<f64>, Vec<_>) = targets.into_iter().map(|(q, g, w)| (w, (q, g))).unzip();
            let p = MssvipProblem::new(sources, targets, cx.coupling()?, alpha, beta)
                .map_err(CliError::from_build)?;
            Problem::Mssvip(p, cx.split_config())
        }
        Kind::SfpCq => {
            if file.config.lambda.is_some() {
                return Err(invalid("kind sfp_cq has no step λ"));
            }
            Problem::SfpCq(cx.sfp()?, cx.split_config())
        }
        Kind::SfpMinNorm => Problem::SfpMinNorm(cx.sfp()?, cx.split_config()),
        Kind::Cvipp => {
            cx.reject_split_only_keys()?;
            let blocks = cx.components("blocks", &file.blocks, n)?;
            let (sets, fields) = blocks.into_iter().map(|(c, f, _)| (c, f)).unzip();
            let p = build_cvipp(fields, sets).map_err(CliError::from_build)?;
            Problem::Cvipp(p, cx.cvip_config())
        }
        Kind::Smp => {
            let (m, a) = (cx.m()?, cx.coupling()?);
            let quad = |name: &str, spec: &Option<FieldSpec>, dim: usize| match spec {
                None | Some(FieldSpec::Zero) => Ok((LinearMap::zeros(dim, dim), Vector::zeros(dim))),
                Some(FieldSpec::Affine {
                    matrix,
                    offset,
                    lipschitz: None,
                }) => cx.quadratic(name, matrix, offset.as_deref(), dim),
                Some(_) => Err(invalid(format!(
                    "{name} of smp must be `zero` or `affine` without `lipschitz`"
                ))),
            };
            let p = build_smp(
                quad("f", &file.f, n)?,
                quad("g", &file.g, m)?,
                cx.set("c", cx.required("c", &file.c)?, n)?,
                cx.set("q", cx.required("q", &file.q)?, m)?,
                a,
            )
            .map_err(CliError::from_build)?;
            Problem::Smp(p, cx.split_config())
        }
        Kind::Szp => {
            let m = cx.m()?;
            let p = SzpProblem::new(
                cx.field("b1", cx.required("b1", &file.b1)?, n)?,
                cx.field("b2", cx.required("b2", &file.b2)?, m)?,
                cx.coupling()?,
            )
            .map_err(CliError::from_build)?;
            Problem::Szp(p, cx.split_config())
        }
    };
    Ok(problem)
}

/// Starting point, optional target start and reference read from the file.
#[derive(Debug, Clone, PartialEq)]
pub struct Start {
    pub x0: Vector<f64>,
    pub y0: Option<Vector<f64>>,
    pub reference: Option<Vector<f64>>,
}

/// Dimension of the iterate: `p·n` for CVIPP, `n` otherwise.
fn iterate_dim(file: &ProblemFile) -> usize {
    match file.kind {
        Kind::Cvipp => file.n * file.blocks.len(),
        _ => file.n,
    }
}

pub fn start(file: &ProblemFile) -> Result<Start, CliError> {
    let cx = Ctx { file };
    let dim = iterate_dim(file);
    let x0 = match &file.x0 {
        Some(x) => cx.vector("x0", x, dim)?,
        None => Vector::zeros(dim),
    };
    let y0 = match &file.y0 {
        Some(y) => Some(cx.vector("y0", y, cx.m()?)?),
        None => None,
    };
    let reference = match &file.reference {
        Some(z) => Some(cx.vector("reference", z, dim)?),
        None => None,
    };
    Ok(Start { x0, y0, reference })
}

impl Problem {
    /// Resolves defaults and checks every step-size bound, exactly as the
    /// solver will when run.
    pub fn settings(&self) -> Result<Settings, Error> {
        match self {
            Problem::Cvip(p, cfg) | Problem::Cvipp(p, cfg) => cvip_settings(p, cfg),
            Problem::SvipProduct(p, cfg) => {
                let lifted = crate::split::build_product_cvip(p);
                cvip_settings(&lifted.problem, cfg)
            }
            Problem::SvipDirect(p, cfg) | Problem::Smp(p, cfg) => direct_settings(p, cfg),
            Problem::SfpMinNorm(p, cfg) => direct_settings(&min_norm_svip(p), cfg),
            Problem::Szp(p, cfg) => direct_settings(&p.to_svip(), cfg),
            Problem::Mssvip(p, cfg) => {
                let s = MssvipSolver::new(p, cfg)?;
                let steps = s.steps();
                Ok(Settings {
                    lambda: Some(steps.lambda),
                    gamma: Some(steps.gamma),
                    lipschitz_bound: Some(steps.lipschitz_bound),
                    spectral: steps.spectral,
                    tol: cfg.tol,
                    max_iter: cfg.max_iter,
                    ..Settings::default()
                })
            }
            Problem::SfpCq(p, cfg) => {
                let s = CqSolver::new(p, cfg.gamma, cfg.tol, cfg.max_iter)?;
                Ok(Settings {
                    gamma: Some(s.gamma()),
                    lipschitz_bound: Some(s.lipschitz_bound()),
                    spectral: Some(p.a().spectral_radius()),
                    tol: cfg.tol,
                    max_iter: cfg.max_iter,
                    ..Settings::default()
                })
            }
        }
    }

    /// The constants step sizes are checked against, independent of the
    /// configured steps.
    pub fn bounds(&self) -> Bounds {
        let a = match self {
            Problem::SvipDirect(p, _) | Problem::Smp(p, _) => p.a(),
            Problem::Mssvip(p, _) => p.a(),
            Problem::SfpCq(p, _) | Problem::SfpMinNorm(p, _) => p.a(),
            Problem::Szp(p, _) => p.a(),
            Problem::Cvip(p, _) | Problem::Cvipp(p, _) => {
                return Bounds {
                    kappa: Some(p.field().lipschitz()),
                    ..Bounds::default()
                }
            }
            Problem::SvipProduct(p, _) => {
                return Bounds {
                    spectral: Some(p.a().spectral_radius()),
                    kappa: Some(p.f().lipschitz().max(p.g().lipschitz())),
                    ..Bounds::default()
                }
            }
        };
        let spectral = a.spectral_radius();
        let norm_bound = spectral.safe_upper_bound();
        let lipschitz_bound = match self {
            Problem::Mssvip(p, _) => {
                let alpha: f64 = p.alpha_weights().iter().sum();
                if p.targets().is_empty() {
                    alpha
                } else {
                    alpha + p.beta_weights().iter().sum::<f64>() * norm_bound
                }
            }
            _ => norm_bound,
        };
        Bounds {
            spectral: Some(spectral),
            lipschitz_bound: Some(lipschitz_bound),
            kappa: None,
        }
    }

    pub fn run(&self, start: &Start) -> Result<RunOutcome, Error> {
        let plain = |report| RunOutcome {
            report,
            extra: Extra::None,
        };
        let z = start.reference.clone();
        let x0 = start.x0.clone();
        match self {
            Problem::Cvip(p, cfg) | Problem::Cvipp(p, cfg) => {
                let mut s = CvipSolver::new(p, cfg)?;
                if let Some(z) = z {
                    s = s.with_reference(z)?;
                }
                Ok(plain(s.solve(x0)?))
            }
            Problem::SvipProduct(p, cfg) => {
                let r = solve_svip_product_with_reference(p, cfg, x0, start.y0.clone(), z.as_ref())?;
                Ok(RunOutcome {
                    report: r.report.clone(),
                    extra: Extra::Product(Box::new(r)),
                })
            }
            Problem::SvipDirect(p, cfg) | Problem::Smp(p, cfg) => Ok(plain(run_direct(p, cfg, x0, z)?)),
            Problem::SfpMinNorm(p, cfg) => Ok(plain(run_direct(&min_norm_svip(p), cfg, x0, z)?)),
            Problem::Szp(p, cfg) => {
                let out = solve_szp_with_reference(p, cfg, x0, z.as_ref())?;
                Ok(RunOutcome {
                    report: out.report,
                    extra: Extra::Szp(out.check),
                })
            }
            Problem::Mssvip(p, cfg) => {
                let mut s = MssvipSolver::new(p, cfg)?;
                if let Some(z) = z {
                    s = s.with_reference(z)?;
                }
                Ok(plain(s.solve(x0)?))
            }
            Problem::SfpCq(p, cfg) => {
                let mut s = CqSolver::new(p, cfg.gamma, cfg.tol, cfg.max_iter)?;
                if let Some(z) = z {
                    s = s.with_reference(z)?;
                }
                Ok(plain(s.solve(x0)?))
            }
        }
    }
}

fn cvip_settings(p: &CvipProblem<f64>, cfg: &CvipConfig<f64>) -> Result<Settings, Error> {
    let s = CvipSolver::new(p, cfg)?;
    Ok(Settings {
        lambda: Some(s.lambda_schedule().at(0)),
        relaxation: Some(cfg.alpha.at(0)),
        kappa: Some(p.field().lipschitz()),
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        ..Settings::default()
    })
}

fn direct_settings(p: &SvipProblem<f64>, cfg: &SplitConfig<f64>) -> Result<Settings, Error> {
    let s = SvipDirect::new(p, cfg)?;
    let steps = s.steps();
    Ok(Settings {
        lambda: Some(steps.lambda),
        gamma: Some(steps.gamma),
        lipschitz_bound: Some(steps.lipschitz_bound),
        spectral: steps.spectral,
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        ..Settings::default()
    })
}

fn run_direct(
    p: &SvipProblem<f64>,
    cfg: &SplitConfig<f64>,
    x0: Vector<f64>,
    z: Option<Vector<f64>>,
) -> Result<SolveReport<f64>, Error> {
    let mut s = SvipDirect::new(p, cfg)?;
    if let Some(z) = z {
        s = s.with_reference(z)?;
    }
    s.solve(x0)
}
