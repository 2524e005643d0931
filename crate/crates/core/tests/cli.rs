use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use splitvi::cli::{load_problem, parse_problem, Overrides, ProblemFile};

const SFP: &str = r#"
kind = "sfp_cq"
n = 1
m = 1
a = [[2.0]]

[c]
type = "box"
lower = [0.0]
upper = [1.0]

[q]
type = "box"
lower = [2.0]
upper = [3.0]
"#;

const SZP_INFEASIBLE: &str = r#"
kind = "szp"
n = 1
m = 2
a = [[1.0], [0.0]]
x0 = [3.0]

[config]
max_iter = 200

[b1]
type = "zero"

[b2]
type = "affine"
matrix = [[1.0, 0.0], [0.0, 1.0]]
offset = [0.0, -1.0]
"#;

const PRODUCT: &str = r#"
kind = "svip_product"
n = 2
m = 2
a = [[2.0, 0.0], [1.0, 1.0]]
x0 = [-3.0, 4.0]
reference = [1.0, 0.5]

[config]
tol = 1e-8

[c]
type = "box"
lower = [1.0, -1.0]
upper = [2.0, 1.0]

[q]
type = "box"
lower = [2.0, 1.0]
upper = [3.0, 2.0]

[f]
type = "affine"
matrix = [[0.5, 0.0], [0.0, 0.5]]
offset = [0.0, -0.25]

[g]
type = "affine"
matrix = [[0.5, 0.0], [0.0, 0.5]]
offset = [0.0, -0.75]
"#;

const CFP: &str = r#"
kind = "mssvip"
n = 2
m = 2
a = [[1.0, 0.0], [0.0, 1.0]]
x0 = [-4.0, 9.0]

[[sources]]
set = { type = "box", lower = [0.0, 0.0], upper = [3.0, 3.0] }

[[sources]]
set = { type = "ball", center = [2.0, 2.0], radius = 1.0 }
weight = 2.0

[[targets]]
set = { type = "halfspace", normal = [1.0, 1.0], offset = 4.0 }
"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn splitvi(args: &[&str], file: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitvi"))
        .args(args)
        .arg(file)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn converged_solve_exits_zero_and_records_default_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "sfp.toml", SFP);
    let out = splitvi(&["solve"], &path);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["status"], "converged");
    assert_eq!(report["kind"], "sfp_cq");
    let x = report["point"][0].as_f64().unwrap();
    assert!((x - 1.0).abs() < 1e-6);
    // ‖A‖² = 4 so the default is 0.9 / L̂ with L̂ just above 4.
    let gamma = report["settings"]["gamma"].as_f64().unwrap();
    let bound = report["settings"]["lipschitz_bound"].as_f64().unwrap();
    assert!((4.0..4.01).contains(&bound));
    assert!((gamma - 0.9 / bound).abs() < 1e-15);
    assert_eq!(
        report["trace"].as_array().unwrap().len(),
        report["iterations"].as_u64().unwrap() as usize + 1
    );
}

#[test]
fn iteration_cap_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "sfp.toml", SFP);
    let out = splitvi(&["solve", "--max-iter", "2", "--tol", "1e-14"], &path);
    assert_eq!(out.status.code(), Some(2));
    let report = json(&out);
    assert_eq!(report["status"], "max_iter");
    assert_eq!(report["iterations"], 2);
}

#[test]
fn rejected_gamma_exits_three_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "sfp.toml", SFP);
    let out = splitvi(&["solve", "--gamma", "0.3"], &path);
    assert_eq!(out.status.code(), Some(3));
    let report = json(&out);
    assert_eq!(report["status"], "rejected_config");
    assert!(report["message"].as_str().unwrap().contains("γ ≥ 1/L"));
    let bad = write(dir.path(), "bad.toml", &SFP.replace("a = [[2.0]]", "a = [[2.0]]\n\n[config]\ngamma = 0.3"));
    let out = splitvi(&["validate"], &bad);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "rejected_config");
}

#[test]
fn invalid_files_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("syntax.toml", "kind = "),
        ("unknown_key.toml", &*SFP.replace("n = 1", "n = 1\nbogus = 3")),
        ("dims.toml", &*SFP.replace("upper = [1.0]", "upper = [1.0, 2.0]")),
        ("kind.toml", &*SFP.replace("sfp_cq", "nonsense")),
    ];
    for (name, text) in cases {
        let path = write(dir.path(), name, text);
        let out = splitvi(&["solve"], &path);
        assert_eq!(out.status.code(), Some(4), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let out = splitvi(&["solve"], &dir.path().join("missing.toml"));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn solved_start_takes_zero_iterations() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "sfp.toml", &SFP.replace("a = [[2.0]]", "a = [[2.0]]\nx0 = [1.0]"));
    let out = splitvi(&["solve"], &path);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["iterations"], 0);
    assert_eq!(report["point"][0], 1.0);
}

#[test]
fn infeasible_szp_hits_cap_and_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "szp.toml", SZP_INFEASIBLE);
    let out = splitvi(&["solve"], &path);
    assert_eq!(out.status.code(), Some(2));
    let check = &json(&out)["szp_check"];
    assert_eq!(check["is_solution"], false);
    assert!(check["b2_norm"].as_f64().unwrap() >= 1.0);
}

#[test]
fn product_report_has_blocks_and_fejer_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "product.toml", PRODUCT);
    let out = splitvi(&["solve"], &path);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let x: Vec<f64> = serde_json::from_value(report["x"].clone()).unwrap();
    let y: Vec<f64> = serde_json::from_value(report["y"].clone()).unwrap();
    assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] - 0.5).abs() < 1e-4);
    assert!((y[0] - 2.0).abs() < 1e-4 && (y[1] - 1.5).abs() < 1e-4);
    assert!(report["split_residuals"]["coupling_gap"].as_f64().unwrap() < 1e-6);
    assert!(report["fejer_violations"].is_array());
}

#[test]
fn multiple_set_file_with_weights_converges() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "cfp.toml", CFP);
    let out = splitvi(&["solve", "--tol", "1e-9"], &path);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let p: Vec<f64> = serde_json::from_value(json(&out)["point"].clone()).unwrap();
    assert!(p[0] + p[1] <= 4.0 + 1e-6);
    assert!(((p[0] - 2.0).powi(2) + (p[1] - 2.0).powi(2)).sqrt() <= 1.0 + 1e-6);
}

#[test]
fn estimate_l_reports_spectral_bound() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "sfp.toml", SFP);
    let out = splitvi(&["estimate-l"], &path);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let value = report["spectral"]["value"].as_f64().unwrap();
    assert!((value - 4.0).abs() < 1e-6);
    assert!(report["spectral"]["safe_upper_bound"].as_f64().unwrap() >= 4.0);
}

#[test]
fn runs_are_deterministic_and_trace_has_expected_columns() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "product.toml", PRODUCT);
    let mut stdouts = Vec::new();
    let mut traces = Vec::new();
    for i in 0..2 {
        let trace = dir.path().join(format!("trace{i}.csv"));
        let out = Command::new(env!("CARGO_BIN_EXE_splitvi"))
            .arg("solve")
            .arg(&path)
            .arg("--trace-out")
            .arg(&trace)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        stdouts.push(out.stdout);
        traces.push(std::fs::read_to_string(&trace).unwrap());
    }
    assert_eq!(stdouts[0], stdouts[1]);
    assert_eq!(traces[0], traces[1]);

    let mut reader = csv::Reader::from_reader(traces[0].as_bytes());
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, ["k", "res_primary", "res_split", "step_norm", "dist_to_ref"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let report: Value = serde_json::from_slice(&stdouts[0]).unwrap();
    assert_eq!(rows.len(), report["trace"].as_array().unwrap().len());
    for (k, row) in rows.iter().enumerate() {
        assert_eq!(row[0].parse::<usize>().unwrap(), k);
        assert!(row[4].parse::<f64>().is_ok());
    }
}

#[test]
fn trace_without_reference_leaves_distance_empty() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "sfp.toml", SFP);
    let trace = dir.path().join("trace.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_splitvi"))
        .arg("solve")
        .arg(&path)
        .arg("--trace-out")
        .arg(&trace)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(',')));
}

#[test]
fn loaded_file_round_trips_through_toml() {
    for text in [SFP, SZP_INFEASIBLE, PRODUCT, CFP] {
        let first = parse_problem(text, &Overrides::default()).unwrap();
        let again = parse_problem(&first.file.to_toml_string(), &Overrides::default()).unwrap();
        assert_eq!(first.file, again.file);
        assert_eq!(first.start, again.start);
        let reparsed = ProblemFile::from_toml_str(&again.file.to_toml_string()).unwrap();
        assert_eq!(reparsed, first.file);
    }
}

#[test]
fn overrides_take_precedence_over_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "sfp.toml", SFP);
    let overrides = Overrides {
        tol: Some(1e-3),
        max_iter: Some(7),
        gamma: Some(0.1),
        lambda: None,
    };
    let loaded = load_problem(&path, &overrides).unwrap();
    assert_eq!(loaded.file.config.tol, Some(1e-3));
    assert_eq!(loaded.file.config.max_iter, Some(7));
    let settings = loaded.settings().unwrap();
    assert_eq!(settings.gamma, Some(0.1));
}
