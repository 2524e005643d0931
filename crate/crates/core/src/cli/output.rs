//! JSON reports and CSV traces.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::linalg::{SpectralEstimate, Vector};
use crate::report::{IterationRecord, SolveReport};

use super::build::{Extra, RunOutcome, Settings};
use super::schema::Kind;

/// Slack for the Fejér check reported when a reference is given.
const FEJER_SLACK: f64 = 1e-12;

pub(crate) fn spectral_json(s: &SpectralEstimate<f64>) -> Value {
    json!({
        "value": s.value,
        "converged": s.converged,
        "iterations": s.iterations,
        "safe_upper_bound": s.safe_upper_bound(),
    })
}

pub fn settings_json(s: &Settings) -> Value {
    json!({
        "lambda": s.lambda,
        "gamma": s.gamma,
        "relaxation": s.relaxation,
        "lipschitz_bound": s.lipschitz_bound,
        "kappa": s.kappa,
        "spectral": s.spectral.as_ref().map(spectral_json),
        "tol": s.tol,
        "max_iter": s.max_iter,
    })
}

fn record_json(r: &IterationRecord<f64>) -> Value {
    json!({
        "k": r.k,
        "res_primary": r.res_primary,
        "res_split": r.res_split,
        "step_norm": r.step_norm,
        "dist_to_ref": r.dist_to_ref,
    })
}

fn point(x: &Vector<f64>) -> Value {
    json!(x.as_slice())
}

pub fn report_json(kind: Kind, settings: &Settings, outcome: &RunOutcome) -> Value {
    let r = &outcome.report;
    let last = r.final_record();
    let mut out = json!({
        "kind": kind.as_str(),
        "status": r.status.as_str(),
        "iterations": r.iterations,
        "point": point(&r.point),
        "final_residual": {
            "primary": last.res_primary,
            "split": last.res_split,
        },
        "settings": settings_json(settings),
        "trace": r.trace.iter().map(record_json).collect::<Vec<_>>(),
    });
    let obj = out.as_object_mut().expect("report is an object");
    if last.dist_to_ref.is_some() {
        obj.insert("fejer_violations".into(), json!(r.fejer_violations(FEJER_SLACK)));
    }
    match &outcome.extra {
        Extra::None => {}
        Extra::Product(p) => {
            obj.insert("x".into(), point(&p.x));
            obj.insert("y".into(), point(&p.y));
            obj.insert(
                "split_residuals".into(),
                json!({
                    "residual_c": p.residual_c,
                    "residual_q": p.residual_q,
                    "coupling_gap": p.coupling_gap,
                    "lambda": p.residual_lambda,
                }),
            );
        }
        Extra::Szp(c) => {
            obj.insert(
                "szp_check".into(),
                json!({
                    "is_solution": c.is_solution,
                    "b1_norm": c.b1_norm,
                    "b2_norm": c.b2_norm,
                }),
            );
        }
    }
    out
}

pub fn rejected_json(kind: Kind, message: &str) -> Value {
    json!({
        "kind": kind.as_str(),
        "status": "rejected_config",
        "message": message,
    })
}

#[derive(Serialize)]
struct Row {
    k: usize,
    res_primary: f64,
    res_split: f64,
    step_norm: f64,
    dist_to_ref: Option<f64>,
}

/// Writes `k,res_primary,res_split,step_norm,dist_to_ref`, one row per record;
/// `dist_to_ref` is empty without a reference.
pub fn write_trace<W: Write>(report: &SolveReport<f64>, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in &report.trace {
        w.serialize(Row {
            k: r.k,
            res_primary: r.res_primary,
            res_split: r.res_split,
            step_norm: r.step_norm,
            dist_to_ref: r.dist_to_ref,
        })?;
    }
    w.flush()?;
    Ok(())
}
