//! Closed convex sets with exact metric projections.

use std::fmt;

use crate::error::{check_dim, Error, Result};
use crate::linalg::Vector;
use crate::scalar::Scalar;

/// Rank tolerance used when orthonormalizing an affine basis.
const RANK_TOL: f64 = 1e-12;
/// Displacements at or below this norm produce the whole-space cut.
const CUT_ZERO_TOL: f64 = 1e-14;

/// Anything with an exact nearest-point map onto a closed convex set.
pub trait ConvexProjector<S: Scalar>: fmt::Debug + Send + Sync {
    /// Ambient dimension.
    fn dim(&self) -> usize;

    /// Nearest point of the set. Implementations may assume `x.dim() == self.dim()`.
    fn project_unchecked(&self, x: &Vector<S>) -> Vector<S>;

    fn project(&self, x: &Vector<S>) -> Result<Vector<S>> {
        check_dim("project", self.dim(), x.dim())?;
        Ok(self.project_unchecked(x))
    }

    fn distance(&self, x: &Vector<S>) -> Result<S> {
        Ok(x.distance(&self.project(x)?))
    }

    /// `‖x − P(x)‖ ≤ tol`.
    fn contains(&self, x: &Vector<S>, tol: S) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }
}

/// The concrete set shapes with closed-form projections.
#[derive(Debug, Clone, PartialEq)]
pub enum SetKind<S> {
    WholeSpace { dim: usize },
    Box { lower: Vector<S>, upper: Vector<S> },
    Ball { center: Vector<S>, radius: S },
    /// `{x : ⟨normal, x⟩ ≤ offset}`.
    HalfSpace { normal: Vector<S>, offset: S },
    /// `{x : ⟨normal, x⟩ = offset}`.
    Hyperplane { normal: Vector<S>, offset: S },
    /// `anchor + span(basis)`, basis orthonormal.
    AffineSubspace {
        basis: Vec<Vector<S>>,
        anchor: Vector<S>,
    },
}

/// A nonempty closed convex set from [`SetKind`], validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectableSet<S> {
    kind: SetKind<S>,
}

impl<S: Scalar> ProjectableSet<S> {
    pub fn whole_space(dim: usize) -> Self {
        Self {
            kind: SetKind::WholeSpace { dim },
        }
    }

    /// Axis-aligned box `lower ≤ x ≤ upper`.
    pub fn box_set(lower: Vector<S>, upper: Vector<S>) -> Result<Self> {
        check_dim("box bounds", lower.dim(), upper.dim())?;
        if let Some(i) = (0..lower.dim()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::InvalidSet(format!(
                "box is empty: lower[{i}] = {} > upper[{i}] = {}",
                lower[i], upper[i]
            )));
        }
        Ok(Self {
            kind: SetKind::Box { lower, upper },
        })
    }

    pub fn ball(center: Vector<S>, radius: S) -> Result<Self> {
        if !(radius >= S::zero()) || !radius.is_finite() {
            return Err(Error::InvalidSet(format!(
                "ball radius must be finite and non-negative, got {radius}"
            )));
        }
        Ok(Self {
            kind: SetKind::Ball { center, radius },
        })
    }

    /// `{x : ⟨normal, x⟩ ≤ offset}`. A zero normal gives the whole space when
    /// `offset ≥ 0` and is rejected as empty otherwise.
    pub fn half_space(normal: Vector<S>, offset: S) -> Result<Self> {
        check_finite_offset(offset)?;
        if normal.norm_squared() == S::zero() {
            if offset >= S::zero() {
                return Ok(Self::whole_space(normal.dim()));
            }
            return Err(Error::InvalidSet(format!(
                "half-space with zero normal and offset {offset} is empty"
            )));
        }
        Ok(Self {
            kind: SetKind::HalfSpace { normal, offset },
        })
    }

    /// `{x : ⟨normal, x⟩ = offset}`. A zero normal gives the whole space when
    /// `offset = 0` and is rejected as empty otherwise.
    pub fn hyperplane(normal: Vector<S>, offset: S) -> Result<Self> {
        check_finite_offset(offset)?;
        if normal.norm_squared() == S::zero() {
            if offset == S::zero() {
                return Ok(Self::whole_space(normal.dim()));
            }
            return Err(Error::InvalidSet(format!(
                "hyperplane with zero normal and offset {offset} is empty"
            )));
        }
        Ok(Self {
            kind: SetKind::Hyperplane { normal, offset },
        })
    }

    /// `anchor + span(spanning)`. The spanning vectors are orthonormalized;
    /// dependent ones are dropped. An empty list gives the single point `anchor`.
    pub fn affine_subspace(spanning: Vec<Vector<S>>, anchor: Vector<S>) -> Result<Self> {
        for b in &spanning {
            check_dim("affine basis vector", anchor.dim(), b.dim())?;
        }
        let basis = orthonormalize(&spanning);
        Ok(Self {
            kind: SetKind::AffineSubspace { basis, anchor },
        })
    }

    pub fn kind(&self) -> &SetKind<S> {
        &self.kind
    }

    /// Whether the set is bounded (used by samplers and oracles).
    pub fn is_bounded(&self) -> bool {
        match &self.kind {
            SetKind::Box { .. } | SetKind::Ball { .. } => true,
            SetKind::AffineSubspace { basis, .. } => basis.is_empty(),
            _ => false,
        }
    }
}

fn check_finite_offset<S: Scalar>(offset: S) -> Result<()> {
    if offset.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { context: "set offset" })
    }
}

/// Modified Gram–Schmidt with one reorthogonalization pass.
fn orthonormalize<S: Scalar>(vectors: &[Vector<S>]) -> Vec<Vector<S>> {
    let tol = S::lit(RANK_TOL);
    let mut basis: Vec<Vector<S>> = Vec::new();
    for v in vectors {
        let scale = v.norm().max(S::one());
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &basis {
                w = w.add_scaled(-w.dot(e), e);
            }
        }
        let n = w.norm();
        if n > tol * scale {
            basis.push(w.scale(S::one() / n));
        }
    }
    basis
}

impl<S: Scalar> ConvexProjector<S> for ProjectableSet<S> {
    fn dim(&self) -> usize {
        match &self.kind {
            SetKind::WholeSpace { dim } => *dim,
            SetKind::Box { lower, .. } => lower.dim(),
            SetKind::Ball { center, .. } => center.dim(),
            SetKind::HalfSpace { normal, .. } | SetKind::Hyperplane { normal, .. } => normal.dim(),
            SetKind::AffineSubspace { anchor, .. } => anchor.dim(),
        }
    }

    fn project_unchecked(&self, x: &Vector<S>) -> Vector<S> {
        match &self.kind {
            SetKind::WholeSpace { .. } => x.clone(),
            SetKind::Box { lower, upper } => Vector::from_vec_unchecked(
                x.iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|(&v, (&lo, &hi))| v.max(lo).min(hi))
                    .collect(),
            ),
            SetKind::Ball { center, radius } => {
                let d = x - center;
                let n = d.norm();
                if n <= *radius {
                    x.clone()
                } else {
                    center.add_scaled(*radius / n, &d)
                }
            }
            SetKind::HalfSpace { normal, offset } => {
                let excess = normal.dot(x) - *offset;
                if excess <= S::zero() {
                    x.clone()
                } else {
                    x.add_scaled(-excess / normal.norm_squared(), normal)
                }
            }
            SetKind::Hyperplane { normal, offset } => {
                let excess = normal.dot(x) - *offset;
                x.add_scaled(-excess / normal.norm_squared(), normal)
            }
            SetKind::AffineSubspace { basis, anchor } => {
                let d = x - anchor;
                basis
                    .iter()
                    .fold(anchor.clone(), |acc, e| acc.add_scaled(d.dot(e), e))
            }
        }
    }
}

/// Cartesian product of sets; projection acts blockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSet<S> {
    blocks: Vec<ProjectableSet<S>>,
}

impl<S: Scalar> ProductSet<S> {
    pub fn new(blocks: Vec<ProjectableSet<S>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidSet("product of zero sets".into()));
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[ProjectableSet<S>] {
        &self.blocks
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(ConvexProjector::dim).collect()
    }
}

impl<S: Scalar> ConvexProjector<S> for ProductSet<S> {
    fn dim(&self) -> usize {
        self.blocks.iter().map(ConvexProjector::dim).sum()
    }

    fn project_unchecked(&self, x: &Vector<S>) -> Vector<S> {
        let parts = x.split_blocks(&self.block_dims());
        let projected: Vec<Vector<S>> = self
            .blocks
            .iter()
            .zip(&parts)
            .map(|(set, p)| set.project_unchecked(p))
            .collect();
        Vector::concat(&projected.iter().collect::<Vec<_>>())
    }
}

/// Half-space `{w : ⟨normal, w⟩ ≤ offset}` whose boundary supports a convex
/// set at `support_point`. A zero normal (with zero offset) is the whole space.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceCut<S> {
    pub normal: Vector<S>,
    pub offset: S,
    pub support_point: Vector<S>,
}

impl<S: Scalar> HalfSpaceCut<S> {
    pub fn is_whole_space(&self) -> bool {
        self.normal.iter().all(|v| *v == S::zero())
    }

    /// `⟨normal, p⟩ − offset`; non-positive inside the cut.
    pub fn violation(&self, p: &Vector<S>) -> S {
        self.normal.dot(p) - self.offset
    }
}

impl<S: Scalar> ConvexProjector<S> for HalfSpaceCut<S> {
    fn dim(&self) -> usize {
        self.normal.dim()
    }

    fn project_unchecked(&self, x: &Vector<S>) -> Vector<S> {
        if self.is_whole_space() {
            return x.clone();
        }
        let excess = self.violation(x);
        if excess <= S::zero() {
            x.clone()
        } else {
            x.add_scaled(-excess / self.normal.norm_squared(), &self.normal)
        }
    }
}

/// The half-space through `P_C(z)` with outward normal `z − P_C(z)`.
///
/// It contains `C` and its boundary passes through the projection. When `z`
/// already lies in `C` the cut is the whole space.
pub fn supporting_halfspace<S, P>(set: &P, z: &Vector<S>) -> Result<HalfSpaceCut<S>>
where
    S: Scalar,
    P: ConvexProjector<S> + ?Sized,
{
    let y = set.project(z)?;
    Ok(cut_from_projection(z, y))
}

pub(crate) fn cut_from_projection<S: Scalar>(z: &Vector<S>, y: Vector<S>) -> HalfSpaceCut<S> {
    let d = z - &y;
    if d.norm() <= S::lit(CUT_ZERO_TOL) {
        return HalfSpaceCut {
            normal: Vector::zeros(z.dim()),
            offset: S::zero(),
            support_point: y,
        };
    }
    let offset = d.dot(&y);
    HalfSpaceCut {
        normal: d,
        offset,
        support_point: y,
    }
}
