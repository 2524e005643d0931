//! Vector fields `f`, `g`, `Bᵢ` with certified constants, the forward-backward
//! map `P_D(I − λh)` and the fixed-point residual of a VIP.

use crate::error::{check_dim, ConfigViolation, Error, Result};
use crate::linalg::{ldl, LinearMap, Vector, DEFAULT_SPECTRAL_MAX_ITER};
use crate::scalar::Scalar;
use crate::sets::ConvexProjector;

/// Relative tolerance for the symmetry test of affine fields.
const SYMMETRY_TOL: f64 = 1e-12;
/// Diagonal shift (relative to `max(1, ‖M‖_F)`) allowed when testing `M ⪰ 0`.
const PSD_SHIFT: f64 = 1e-10;

/// Inverse strong monotonicity constant `α` of a field:
/// `⟨h(x) − h(y), x − y⟩ ≥ α‖h(x) − h(y)‖²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IsmConstant<S> {
    /// Holds for every `α` (constant fields).
    Unbounded,
    Finite(S),
    /// Not known to be ISM.
    Unknown,
}

impl<S: Scalar> IsmConstant<S> {
    /// `α` as a scalar, `+∞` for [`IsmConstant::Unbounded`].
    pub fn value(&self) -> Option<S> {
        match *self {
            IsmConstant::Unbounded => Some(S::infinity()),
            IsmConstant::Finite(a) => Some(a),
            IsmConstant::Unknown => None,
        }
    }

    /// The weaker of two constants, as needed for `α = min{α₁, α₂}`.
    pub fn min(self, other: Self) -> Self {
        match (self, other) {
            (IsmConstant::Unknown, _) | (_, IsmConstant::Unknown) => IsmConstant::Unknown,
            (IsmConstant::Unbounded, o) | (o, IsmConstant::Unbounded) => o,
            (IsmConstant::Finite(a), IsmConstant::Finite(b)) => IsmConstant::Finite(a.min(b)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind<S> {
    Zero { dim: usize },
    Identity { dim: usize },
    /// `x ↦ Mx + q`.
    Affine { matrix: LinearMap<S>, offset: Vector<S> },
}

/// An operator `h : Rⁿ → Rⁿ` carrying its Lipschitz constant `κ` and ISM constant `α`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField<S> {
    kind: FieldKind<S>,
    lipschitz: S,
    ism: IsmConstant<S>,
}

impl<S: Scalar> VectorField<S> {
    pub fn zero(dim: usize) -> Self {
        Self {
            kind: FieldKind::Zero { dim },
            lipschitz: S::zero(),
            ism: IsmConstant::Unbounded,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kind: FieldKind::Identity { dim },
            lipschitz: S::one(),
            ism: IsmConstant::Finite(S::one()),
        }
    }

    /// `x ↦ Mx + q` with `M` symmetric positive semidefinite.
    ///
    /// `κ = λ_max(M)` is estimated by power iteration and `α = 1/κ`. Any other
    /// matrix is rejected; use [`VectorField::affine_with_lipschitz`] for those.
    pub fn affine(matrix: LinearMap<S>, offset: Vector<S>) -> Result<Self> {
        check_affine_dims(&matrix, &offset)?;
        if !matrix.is_symmetric(S::lit(SYMMETRY_TOL)) {
            return Err(Error::InvalidField(
                "matrix is not symmetric; supply a Lipschitz constant instead".into(),
            ));
        }
        if !is_positive_semidefinite(&matrix) {
            return Err(Error::InvalidField(
                "matrix is not positive semidefinite; supply a Lipschitz constant instead".into(),
            ));
        }
        let kappa = spectral_norm(&matrix)?;
        let ism = if kappa > S::zero() {
            IsmConstant::Finite(S::one() / kappa)
        } else {
            IsmConstant::Unbounded
        };
        Ok(Self {
            kind: FieldKind::Affine { matrix, offset },
            lipschitz: kappa,
            ism,
        })
    }

    /// `x ↦ Mx + q` for arbitrary square `M`, with a caller-supplied Lipschitz
    /// constant. The constant must dominate `‖M‖₂`; the field is not treated as ISM.
    pub fn affine_with_lipschitz(matrix: LinearMap<S>, offset: Vector<S>, lipschitz: S) -> Result<Self> {
        check_affine_dims(&matrix, &offset)?;
        if !(lipschitz >= S::zero()) || !lipschitz.is_finite() {
            return Err(Error::InvalidField(format!(
                "Lipschitz constant must be finite and non-negative, got {lipschitz}"
            )));
        }
        let norm = spectral_norm(&matrix)?;
        if lipschitz < norm * (S::one() - S::lit(1e-8)) {
            return Err(Error::InvalidField(format!(
                "Lipschitz constant {lipschitz} is below ‖M‖₂ ≈ {norm}"
            )));
        }
        Ok(Self {
            kind: FieldKind::Affine { matrix, offset },
            lipschitz,
            ism: IsmConstant::Unknown,
        })
    }

    /// `h(x₁, …, x_p) = (h₁(x₁), …, h_p(x_p))` on the product space, with
    /// `κ = max κᵢ` and `α = min αᵢ`.
    pub fn block_diagonal(fields: &[&Self]) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::InvalidField("block field needs at least one block".into()));
        }
        let dim: usize = fields.iter().map(|f| f.dim()).sum();
        let lipschitz = fields.iter().fold(S::zero(), |m, f| m.max(f.lipschitz));
        let ism = fields
            .iter()
            .fold(IsmConstant::Unbounded, |acc, f| acc.min(f.ism));
        if fields.iter().all(|f| matches!(f.kind, FieldKind::Zero { .. })) {
            return Ok(Self::zero(dim));
        }
        let mut matrices = Vec::with_capacity(fields.len());
        let mut offsets = Vec::with_capacity(fields.len());
        for f in fields {
            let (m, q) = f.affine_parts();
            matrices.push(m);
            offsets.push(q);
        }
        let matrix = LinearMap::block_diagonal(&matrices.iter().collect::<Vec<_>>());
        let offset = Vector::concat(&offsets.iter().collect::<Vec<_>>());
        Ok(Self {
            kind: FieldKind::Affine { matrix, offset },
            lipschitz,
            ism,
        })
    }

    /// `(M, q)` with `h(x) = Mx + q`.
    pub fn affine_parts(&self) -> (LinearMap<S>, Vector<S>) {
        match &self.kind {
            FieldKind::Zero { dim } => (LinearMap::zeros(*dim, *dim), Vector::zeros(*dim)),
            FieldKind::Identity { dim } => (LinearMap::identity(*dim), Vector::zeros(*dim)),
            FieldKind::Affine { matrix, offset } => (matrix.clone(), offset.clone()),
        }
    }

    pub fn kind(&self) -> &FieldKind<S> {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            FieldKind::Zero { dim } | FieldKind::Identity { dim } => *dim,
            FieldKind::Affine { offset, .. } => offset.dim(),
        }
    }

    /// Lipschitz constant `κ`.
    pub fn lipschitz(&self) -> S {
        self.lipschitz
    }

    pub fn ism(&self) -> IsmConstant<S> {
        self.ism
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, FieldKind::Zero { .. })
    }

    pub fn evaluate(&self, x: &Vector<S>) -> Result<Vector<S>> {
        check_dim("evaluate", self.dim(), x.dim())?;
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &Vector<S>) -> Vector<S> {
        match &self.kind {
            FieldKind::Zero { dim } => Vector::zeros(*dim),
            FieldKind::Identity { .. } => x.clone(),
            FieldKind::Affine { matrix, offset } => &matrix.apply_unchecked(x) + offset,
        }
    }
}

fn check_affine_dims<S: Scalar>(matrix: &LinearMap<S>, offset: &Vector<S>) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::InvalidField(format!(
            "affine field needs a square matrix, got {}×{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    check_dim("affine offset", matrix.rows(), offset.dim())
}

/// `‖M‖₂`, falling back to the Frobenius bound if power iteration stalls.
fn spectral_norm<S: Scalar>(matrix: &LinearMap<S>) -> Result<S> {
    let tol = S::epsilon() * S::lit(64.0);
    let est = matrix.estimate_spectral_radius(tol, DEFAULT_SPECTRAL_MAX_ITER)?;
    let squared = if est.converged {
        est.value
    } else {
        est.safe_upper_bound()
    };
    Ok(squared.sqrt())
}

fn is_positive_semidefinite<S: Scalar>(matrix: &LinearMap<S>) -> bool {
    let n = matrix.rows();
    let shift = S::lit(PSD_SHIFT) * matrix.frobenius_norm_squared().sqrt().max(S::one());
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let sym = (matrix.get(i, j) + matrix.get(j, i)) / S::lit(2.0);
            data.push(if i == j { sym + shift } else { sym });
        }
    }
    ldl(n, &data).is_some()
}

/// The operator `x ↦ P_D(x − λh(x))`.
#[derive(Debug, Clone, Copy)]
pub struct ForwardBackwardMap<'a, S, P: ?Sized> {
    set: &'a P,
    field: &'a VectorField<S>,
    lambda: S,
}

impl<'a, S, P> ForwardBackwardMap<'a, S, P>
where
    S: Scalar,
    P: ConvexProjector<S> + ?Sized,
{
    pub fn new(set: &'a P, field: &'a VectorField<S>, lambda: S) -> Result<Self> {
        check_dim("forward-backward field", set.dim(), field.dim())?;
        if !(lambda >= S::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "λ must be finite and non-negative, got {lambda}"
            )));
        }
        Ok(Self { set, field, lambda })
    }

    /// Like [`ForwardBackwardMap::new`], additionally requiring `λ ∈ [0, 2α]` so
    /// that the map is nonexpansive.
    pub fn nonexpansive(set: &'a P, field: &'a VectorField<S>, lambda: S) -> Result<Self> {
        let fb = Self::new(set, field, lambda)?;
        check_lambda_against_ism(lambda, field.ism(), "field")?;
        Ok(fb)
    }

    pub fn lambda(&self) -> S {
        self.lambda
    }

    pub fn apply(&self, x: &Vector<S>) -> Result<Vector<S>> {
        check_dim("forward_backward", self.set.dim(), x.dim())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Vector<S>) -> Vector<S> {
        if self.field.is_zero() {
            return self.set.project_unchecked(x);
        }
        let fx = self.field.evaluate_unchecked(x);
        self.set.project_unchecked(&x.add_scaled(-self.lambda, &fx))
    }

    /// `‖x − P_D(x − λh(x))‖`.
    pub(crate) fn residual_unchecked(&self, x: &Vector<S>) -> S {
        x.distance(&self.apply_unchecked(x))
    }
}

/// Rejects `λ > 2α`, or any `λ` when the field has no ISM constant.
pub(crate) fn check_lambda_against_ism<S: Scalar>(
    lambda: S,
    ism: IsmConstant<S>,
    role: &str,
) -> std::result::Result<(), ConfigViolation> {
    match ism.value() {
        None => Err(ConfigViolation::NotIsm { role: role.into() }),
        Some(alpha) => {
            let limit = S::lit(2.0) * alpha;
            if lambda > limit {
                Err(ConfigViolation::LambdaAboveTwiceIsm {
                    lambda: lambda.to_f64_lossy(),
                    limit: limit.to_f64_lossy(),
                    role: role.into(),
                })
            } else {
                Ok(())
            }
        }
    }
}

/// Fixed-point residual `‖x − P_C(x − λf(x))‖`, zero exactly on `SOL(C, f)`.
pub fn vip_residual<S, P>(set: &P, field: &VectorField<S>, lambda: S, x: &Vector<S>) -> Result<S>
where
    S: Scalar,
    P: ConvexProjector<S> + ?Sized,
{
    if !(lambda > S::zero()) {
        return Err(Error::InvalidArgument(format!(
            "residual step λ must be positive, got {lambda}"
        )));
    }
    let fb = ForwardBackwardMap::new(set, field, lambda)?;
    check_dim("vip_residual", set.dim(), x.dim())?;
    Ok(fb.residual_unchecked(x))
}
