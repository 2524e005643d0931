//! Random points for property checks and empirical verification.
//!
//! Bounded sets are sampled uniformly (rejection from the bounding cube for
//! balls). Unbounded sets are sampled inside a cube of half-width `spread`
//! around the origin and then mapped into the set: reflection for
//! half-spaces, parametrization for affine sets.

use rand::Rng;

use crate::linalg::Vector;
use crate::scalar::Scalar;
use crate::sets::{ConvexProjector, ProjectableSet, SetKind};

/// Uniform point of the cube `[-spread, spread]^dim`.
pub fn random_vector<S: Scalar, R: Rng + ?Sized>(rng: &mut R, dim: usize, spread: f64) -> Vector<S> {
    Vector::from_vec_unchecked(
        (0..dim)
            .map(|_| S::lit(rng.gen_range(-spread..=spread)))
            .collect(),
    )
}

/// A random point of `set`.
pub fn sample_point<S: Scalar, R: Rng + ?Sized>(
    set: &ProjectableSet<S>,
    rng: &mut R,
    spread: f64,
) -> Vector<S> {
    match set.kind() {
        SetKind::WholeSpace { dim } => random_vector(rng, *dim, spread),
        SetKind::Box { lower, upper } => Vector::from_vec_unchecked(
            lower
                .iter()
                .zip(upper.iter())
                .map(|(&lo, &hi)| {
                    let t = S::lit(rng.gen_range(0.0..=1.0));
                    (lo + t * (hi - lo)).min(hi)
                })
                .collect(),
        ),
        SetKind::Ball { center, radius } => {
            let r = radius.to_f64_lossy();
            loop {
                let d: Vector<S> = random_vector(rng, center.dim(), 1.0);
                if d.norm() <= S::one() {
                    return center.add_scaled(S::lit(r), &d);
                }
            }
        }
        SetKind::HalfSpace { normal, offset } => {
            let x = random_vector(rng, normal.dim(), spread);
            let excess = normal.dot(&x) - *offset;
            if excess <= S::zero() {
                x
            } else {
                x.add_scaled(-S::lit(2.0) * excess / normal.norm_squared(), normal)
            }
        }
        SetKind::Hyperplane { .. } => {
            let x = random_vector(rng, set.dim(), spread);
            set.project_unchecked(&x)
        }
        SetKind::AffineSubspace { basis, anchor } => basis.iter().fold(anchor.clone(), |acc, e| {
            acc.add_scaled(S::lit(rng.gen_range(-spread..=spread)), e)
        }),
    }
}

/// A random set of the given dimension from the closed-form vocabulary.
pub fn random_set<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ProjectableSet<f64> {
    let rv = |rng: &mut R| -> Vector<f64> { random_vector(rng, dim, 3.0) };
    match rng.gen_range(0..6) {
        0 => ProjectableSet::whole_space(dim),
        1 => {
            let a = rv(rng);
            let b = rv(rng);
            ProjectableSet::box_set(a.zip_map(&b, f64::min), a.zip_map(&b, f64::max))
                .expect("ordered bounds")
        }
        2 => ProjectableSet::ball(rv(rng), rng.gen_range(0.0..3.0)).expect("valid radius"),
        3 => ProjectableSet::half_space(rv(rng), rng.gen_range(-2.0..2.0))
            .unwrap_or_else(|_| ProjectableSet::whole_space(dim)),
        4 => ProjectableSet::hyperplane(rv(rng), rng.gen_range(-2.0..2.0))
            .unwrap_or_else(|_| ProjectableSet::whole_space(dim)),
        _ => {
            let k = rng.gen_range(0..=dim);
            let basis = (0..k).map(|_| rv(rng)).collect();
            ProjectableSet::affine_subspace(basis, rv(rng)).expect("matching dims")
        }
    }
}
