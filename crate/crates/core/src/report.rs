//! Solve reports and the shared iteration driver.

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::scalar::Scalar;

/// Default stopping tolerance of every solver.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default iteration cap of every solver.
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIter,
    RejectedConfig,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIter => "max_iter",
            Status::RejectedConfig => "rejected_config",
        }
    }
}

/// One row of the convergence trace.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<S> {
    pub k: usize,
    /// Residual of the source-space problem (meaning depends on the solver).
    pub res_primary: S,
    /// Residual of the coupling or target-space condition.
    pub res_split: S,
    /// `‖x^k − x^{k−1}‖`, zero for `k = 0`.
    pub step_norm: S,
    /// `‖x^k − z‖` when a reference solution `z` was supplied.
    pub dist_to_ref: Option<S>,
    /// Distance from the intermediate point that produced `x^k` to `z`
    /// (`u^{k−1}` of the direct split method); `None` otherwise.
    pub mid_dist_to_ref: Option<S>,
}

impl<S: Scalar> IterationRecord<S> {
    pub fn residual(&self) -> S {
        self.res_primary.max(self.res_split)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport<S> {
    pub status: Status,
    pub point: Vector<S>,
    pub iterations: usize,
    /// `iterations + 1` records, starting with the initial point.
    pub trace: Vec<IterationRecord<S>>,
}

impl<S: Scalar> SolveReport<S> {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn final_record(&self) -> &IterationRecord<S> {
        self.trace.last().expect("trace is never empty")
    }

    pub fn final_residual(&self) -> S {
        self.final_record().residual()
    }

    /// Iterations `k ≥ 1` at which `‖x^k − z‖ > ‖x^{k−1} − z‖ + slack`.
    pub fn fejer_violations(&self, slack: S) -> Vec<usize> {
        self.trace
            .windows(2)
            .filter_map(|w| match (w[0].dist_to_ref, w[1].dist_to_ref) {
                (Some(prev), Some(cur)) if cur > prev + slack => Some(w[1].k),
                _ => None,
            })
            .collect()
    }

    /// Iterations violating `‖x^k − z‖ ≤ ‖u^{k−1} − z‖ ≤ ‖x^{k−1} − z‖` (with slack).
    pub fn interleaved_fejer_violations(&self, slack: S) -> Vec<usize> {
        self.trace
            .windows(2)
            .filter_map(|w| {
                let (prev, mid, cur) = (w[0].dist_to_ref?, w[1].mid_dist_to_ref?, w[1].dist_to_ref?);
                (cur > mid + slack || mid > prev + slack).then_some(w[1].k)
            })
            .collect()
    }
}

/// Output of one solver step.
pub(crate) struct Advance<S> {
    pub next: Vector<S>,
    pub mid: Option<Vector<S>>,
}

/// Runs `step` from `x0` until `max(residuals) ≤ tol` or `max_iter` steps.
pub(crate) fn drive<S, F, R>(
    x0: Vector<S>,
    tol: S,
    max_iter: usize,
    reference: Option<&Vector<S>>,
    mut step: F,
    residuals: R,
) -> Result<SolveReport<S>>
where
    S: Scalar,
    F: FnMut(usize, &Vector<S>) -> Advance<S>,
    R: Fn(&Vector<S>) -> (S, S),
{
    let dist = |p: &Vector<S>| reference.map(|z| p.distance(z));
    let (p0, s0) = residuals(&x0);
    let mut trace = vec![IterationRecord {
        k: 0,
        res_primary: p0,
        res_split: s0,
        step_norm: S::zero(),
        dist_to_ref: dist(&x0),
        mid_dist_to_ref: None,
    }];
    let mut x = x0;
    if p0.max(s0) <= tol {
        return Ok(SolveReport {
            status: Status::Converged,
            point: x,
            iterations: 0,
            trace,
        });
    }
    for k in 1..=max_iter {
        let Advance { next, mid } = step(k - 1, &x);
        if !next.is_finite() {
            return Err(Error::Diverged { iteration: k });
        }
        let (res_primary, res_split) = residuals(&next);
        trace.push(IterationRecord {
            k,
            res_primary,
            res_split,
            step_norm: next.distance(&x),
            dist_to_ref: dist(&next),
            mid_dist_to_ref: mid.as_ref().and_then(dist),
        });
        x = next;
        if res_primary.max(res_split) <= tol {
            return Ok(SolveReport {
                status: Status::Converged,
                point: x,
                iterations: k,
                trace,
            });
        }
    }
    Ok(SolveReport {
        status: Status::MaxIter,
        point: x,
        iterations: max_iter,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn halving(x0: f64, tol: f64, max_iter: usize) -> SolveReport<f64> {
        let z = Vector::from_f64(&[0.0]).unwrap();
        drive(
            Vector::from_f64(&[x0]).unwrap(),
            tol,
            max_iter,
            Some(&z),
            |_, x| Advance {
                next: x.scale(0.5),
                mid: None,
            },
            |x| (x.norm(), 0.0),
        )
        .unwrap()
    }

    #[test]
    fn trace_has_one_record_per_iteration_plus_start() {
        let r = halving(1.0, 1e-3, 100);
        assert!(r.converged());
        assert_eq!(r.iterations, 10);
        assert_eq!(r.trace.len(), r.iterations + 1);
        assert!(r.fejer_violations(0.0).is_empty());
        assert_eq!(r.trace[1].step_norm, 0.5);
    }

    #[test]
    fn already_solved_start_takes_zero_iterations() {
        let r = halving(0.0, 1e-3, 100);
        assert_eq!((r.status, r.iterations, r.trace.len()), (Status::Converged, 0, 1));
    }

    #[test]
    fn max_iter_status() {
        let r = halving(1.0, 1e-12, 5);
        assert_eq!(r.status, Status::MaxIter);
        assert_eq!(r.trace.len(), 6);
    }

    #[test]
    fn divergence_is_an_error() {
        let err = drive(
            Vector::from_f64(&[1.0]).unwrap(),
            1e-9,
            10_000,
            None,
            |_, x| Advance {
                next: x.scale(1e100),
                mid: None,
            },
            |x: &Vector<f64>| (x.norm(), 0.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }));
    }
}
