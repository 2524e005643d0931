//! Dense vectors and matrices.
//!
//! Only what the solvers need: inner products, matrix-vector products with the
//! transpose, a power-iteration estimate of `λ_max(AᵀA)` and an `LDLᵀ` solve
//! of `(I + AᵀA) x = r`.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

/// Seed of the power-iteration start vector, fixed so runs are reproducible.
const POWER_ITERATION_SEED: u64 = 0x5eed_5b1d;

/// Default relative tolerance of [`LinearMap::estimate_spectral_radius`].
pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-10;
/// Default iteration cap of [`LinearMap::estimate_spectral_radius`].
pub const DEFAULT_SPECTRAL_MAX_ITER: usize = 10_000;

/// A point of `Rⁿ`. Entries are always finite.
#[derive(Clone, PartialEq, Default)]
pub struct Vector<S> {
    data: Vec<S>,
}

impl<S: Scalar> Vector<S> {
    /// Builds a vector, rejecting NaN and infinite entries.
    pub fn new(data: Vec<S>) -> Result<Self> {
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "vector" });
        }
        Ok(Self { data })
    }

    pub fn from_slice(data: &[S]) -> Result<Self> {
        Self::new(data.to_vec())
    }

    /// Builds from `f64` entries, converting to the scalar type.
    pub fn from_f64(data: &[f64]) -> Result<Self> {
        Self::new(data.iter().map(|&v| S::lit(v)).collect())
    }

    pub(crate) fn from_vec_unchecked(data: Vec<S>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![S::zero(); dim],
        }
    }

    pub fn filled(dim: usize, value: S) -> Self {
        Self {
            data: vec![value; dim],
        }
    }

    /// The `i`-th standard basis vector of `Rⁿ`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[i] = S::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<S> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S> {
        self.data.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Euclidean inner product. Panics if dimensions differ.
    pub fn dot(&self, other: &Self) -> S {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(S::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm_squared(&self) -> S {
        self.dot(self)
    }

    pub fn norm(&self) -> S {
        self.norm_squared().sqrt()
    }

    pub fn norm_inf(&self) -> S {
        self.data.iter().fold(S::zero(), |m, v| m.max(v.abs()))
    }

    pub fn distance(&self, other: &Self) -> S {
        self.zip_map(other, |a, b| a - b).norm()
    }

    pub fn scale(&self, factor: S) -> Self {
        self.map(|v| v * factor)
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, factor: S, other: &Self) -> Self {
        self.zip_map(other, |a, b| a + factor * b)
    }

    /// Convex combination `weight * self + (1 - weight) * other`.
    pub fn lerp_towards(&self, weight: S, other: &Self) -> Self {
        let rest = S::one() - weight;
        self.zip_map(other, |a, b| weight * a + rest * b)
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self {
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(S, S) -> S) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Stacks vectors into one point of the product space.
    pub fn concat(parts: &[&Self]) -> Self {
        let mut data = Vec::with_capacity(parts.iter().map(|p| p.dim()).sum());
        for p in parts {
            data.extend_from_slice(&p.data);
        }
        Self { data }
    }

    /// Splits into consecutive blocks of the given sizes, which must sum to `dim`.
    pub fn split_blocks(&self, sizes: &[usize]) -> Vec<Self> {
        assert_eq!(sizes.iter().sum::<usize>(), self.dim(), "block sizes");
        let mut out = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &s in sizes {
            out.push(Self {
                data: self.data[start..start + s].to_vec(),
            });
            start += s;
        }
        out
    }
}

impl<S: fmt::Debug> fmt::Debug for Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.iter()).finish()
    }
}

impl<S> Index<usize> for Vector<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.data[i]
    }
}

impl<S: Scalar> Add for &Vector<S> {
    type Output = Vector<S>;
    fn add(self, rhs: &Vector<S>) -> Vector<S> {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl<S: Scalar> Sub for &Vector<S> {
    type Output = Vector<S>;
    fn sub(self, rhs: &Vector<S>) -> Vector<S> {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl<S: Scalar> Mul<S> for &Vector<S> {
    type Output = Vector<S>;
    fn mul(self, rhs: S) -> Vector<S> {
        self.scale(rhs)
    }
}

impl<S: Scalar> Neg for &Vector<S> {
    type Output = Vector<S>;
    fn neg(self) -> Vector<S> {
        self.map(|v| -v)
    }
}

/// Outcome of the power iteration on `AᵀA`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate<S> {
    /// Rayleigh-quotient estimate of `λ_max(AᵀA)`.
    pub value: S,
    pub converged: bool,
    pub iterations: usize,
    /// Relative tolerance the estimate was run with.
    pub tol: S,
    /// `‖A‖_F²`, an upper bound on `λ_max(AᵀA)`.
    pub frobenius_squared: S,
}

impl<S: Scalar> SpectralEstimate<S> {
    /// An upper bound on `λ_max(AᵀA)` suitable for capping step sizes.
    ///
    /// Converged estimates are inflated by their tolerance; unconverged ones
    /// fall back to the Frobenius bound.
    pub fn safe_upper_bound(&self) -> S {
        if self.converged {
            (self.value * (S::one() + self.tol)).min(self.frobenius_squared.max(self.value))
        } else {
            self.frobenius_squared.max(self.value)
        }
    }
}

/// Dense `rows × cols` real matrix acting as a linear map `R^cols → R^rows`.
#[derive(Clone, PartialEq)]
pub struct LinearMap<S> {
    rows: usize,
    cols: usize,
    /// Row-major entries.
    data: Vec<S>,
}

impl<S: Scalar> LinearMap<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMap(format!(
                "matrix must be non-empty, got {rows}×{cols}"
            )));
        }
        check_dim("matrix entries", rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { context: "matrix" });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            check_dim("matrix row length", cols, row.len())?;
            data.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let converted: Vec<Vec<S>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| S::lit(v)).collect())
            .collect();
        Self::from_rows(&converted)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![S::one(); n])
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn diagonal(diag: &[S]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// Block-diagonal matrix with the given square or rectangular blocks.
    pub fn block_diagonal(blocks: &[&Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.data[(r0 + i) * cols + c0 + j] = b.get(i, j);
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    /// `Ax`.
    pub fn apply(&self, x: &Vector<S>) -> Result<Vector<S>> {
        check_dim("apply_map", self.cols, x.dim())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Vector<S>) -> Vector<S> {
        let xs = x.as_slice();
        let out = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(xs)
                    .fold(S::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect();
        Vector::from_vec_unchecked(out)
    }

    /// `Aᵀy`.
    pub fn apply_adjoint(&self, y: &Vector<S>) -> Result<Vector<S>> {
        check_dim("apply_adjoint", self.rows, y.dim())?;
        Ok(self.apply_adjoint_unchecked(y))
    }

    pub(crate) fn apply_adjoint_unchecked(&self, y: &Vector<S>) -> Vector<S> {
        let mut out = vec![S::zero(); self.cols];
        for (i, &yi) in y.as_slice().iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * yi;
            }
        }
        Vector::from_vec_unchecked(out)
    }

    /// `AᵀA` as a `cols × cols` matrix.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let s = (0..self.rows).fold(S::zero(), |acc, k| {
                    acc + self.get(k, i) * self.get(k, j)
                });
                g.data[i * n + j] = s;
                g.data[j * n + i] = s;
            }
        }
        g
    }

    pub fn frobenius_norm_squared(&self) -> S {
        self.data.iter().fold(S::zero(), |acc, &v| acc + v * v)
    }

    /// Symmetry up to `tol` relative to the largest entry.
    pub fn is_symmetric(&self, tol: S) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.data.iter().fold(S::one(), |m, v| m.max(v.abs()));
        (0..self.rows).all(|i| {
            (i + 1..self.cols).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol * scale)
        })
    }

    /// Estimates `λ_max(AᵀA)` (the squared spectral norm) by power iteration.
    ///
    /// Stops once the Rayleigh quotient changes by at most `tol` relative to
    /// itself. The zero map returns 0 immediately. Hitting `max_iter` returns
    /// the last estimate with `converged == false`.
    pub fn estimate_spectral_radius(&self, tol: S, max_iter: usize) -> Result<SpectralEstimate<S>> {
        if !(tol > S::zero()) {
            return Err(Error::InvalidArgument(format!(
                "spectral tolerance must be positive, got {tol}"
            )));
        }
        let frobenius_squared = self.frobenius_norm_squared();
        let done = |value, converged, iterations| SpectralEstimate {
            value,
            converged,
            iterations,
            tol,
            frobenius_squared,
        };
        if frobenius_squared == S::zero() {
            return Ok(done(S::zero(), true, 0));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(POWER_ITERATION_SEED);
        let start: Vec<S> = (0..self.cols)
            .map(|_| S::lit(rng.gen_range(-1.0..1.0)))
            .collect();
        let mut v = Vector::from_vec_unchecked(start);
        let n0 = v.norm();
        v = v.scale(S::one() / n0);

        let mut estimate = S::zero();
        for k in 1..=max_iter {
            let av = self.apply_unchecked(&v);
            let rayleigh = av.norm_squared();
            let w = self.apply_adjoint_unchecked(&av);
            let wn = w.norm();
            if wn == S::zero() {
                // Start vector landed in the kernel; restart along a basis vector.
                v = Vector::unit(self.cols, k % self.cols);
                continue;
            }
            let converged = k > 1 && (rayleigh - estimate).abs() <= tol * rayleigh;
            estimate = rayleigh;
            if converged {
                return Ok(done(estimate, true, k));
            }
            v = w.scale(S::one() / wn);
        }
        Ok(done(estimate, false, max_iter))
    }

    /// `estimate_spectral_radius` with the default tolerance and iteration cap.
    pub fn spectral_radius(&self) -> SpectralEstimate<S> {
        self.estimate_spectral_radius(S::lit(DEFAULT_SPECTRAL_TOL), DEFAULT_SPECTRAL_MAX_ITER)
            .expect("default spectral tolerance is positive")
    }

    /// Solves `(I + AᵀA) x = r` by `LDLᵀ` factorization.
    pub fn solve_regularized_normal(&self, r: &Vector<S>) -> Result<Vector<S>> {
        check_dim("solve_regularized_normal", self.cols, r.dim())?;
        let n = self.cols;
        let mut system = self.gram();
        for i in 0..n {
            system.data[i * n + i] = system.data[i * n + i] + S::one();
        }
        let factor = ldl(n, &system.data).ok_or_else(|| {
            Error::InvalidMap("I + AᵀA failed to factor; matrix entries too large".into())
        })?;
        Ok(Vector::from_vec_unchecked(ldl_solve(
            n,
            &factor,
            r.as_slice(),
        )))
    }
}

impl<S: fmt::Debug> fmt::Debug for LinearMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[S]> = if self.cols == 0 {
            vec![&[]; self.rows]
        } else {
            self.data.chunks(self.cols).collect()
        };
        f.debug_struct("LinearMap")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &rows)
            .finish()
    }
}

/// Square-root-free Cholesky factorization `A = LDLᵀ` of a symmetric `n × n`
/// row-major matrix: `L` is unit lower triangular and `D` is stored on its
/// diagonal. `None` when a pivot is not strictly positive.
pub(crate) fn ldl<S: Scalar>(n: usize, a: &[S]) -> Option<Vec<S>> {
    let mut l = vec![S::zero(); n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d = d - l[j * n + k] * l[j * n + k] * l[k * n + k];
        }
        if !(d > S::zero()) || !d.is_finite() {
            return None;
        }
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k] * l[k * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Some(l)
}

/// Solves `LDLᵀx = b` given the packed factor from [`ldl`].
pub(crate) fn ldl_solve<S: Scalar>(n: usize, l: &[S], b: &[S]) -> Vec<S> {
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] = y[i] - l[i * n + k] * y[k];
        }
    }
    for i in 0..n {
        y[i] = y[i] / l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] = y[i] - l[k * n + i] * y[k];
        }
    }
    y
}
