//! End-to-end runs of the `mnar-bounds` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mnar-bounds"))
        .args(args)
        .env_remove("MNAR_BOUNDS_THREADS")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn round2(x: &Value) -> f64 {
    (x.as_f64().unwrap() * 100.0).round() / 100.0
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn example_prints_rounded_values() {
    let out = run(&["example"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for needle in ["RR_true", "0.88", "RR_CC", "3.94", "RR_MI", "2.01", "[0.74, 1.44]"] {
        assert!(text.contains(needle), "missing {needle} in\n{text}");
    }
}

#[test]
fn example_json_and_risk_difference() {
    let v = ok_json(&["example"]);
    assert_eq!(round2(&v["truth"]), 0.88);
    assert_eq!((round2(&v["bounds"]["lb"]), round2(&v["bounds"]["ub"])), (0.74, 1.44));

    let v = ok_json(&["example", "--contrast", "rd"]);
    let (lb, ub) = (v["bounds"]["lb"].as_f64().unwrap(), v["bounds"]["ub"].as_f64().unwrap());
    assert!(lb <= -0.07 && -0.07 <= ub);
}

#[test]
fn emitted_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let law = dir.path().join("law.json");
    let law_again = dir.path().join("law2.json");
    let direct = ok_json(&["example", "--write-model", path_str(&model), "--write-law", path_str(&law)]);

    let from_model = ok_json(&["eval", path_str(&model), "--write-law", path_str(&law_again)]);
    for key in ["truth", "complete_case", "multiple_imputation", "bounds", "potentials"] {
        assert_eq!(from_model[key], direct[key], "{key}");
    }
    assert_eq!(std::fs::read(&law).unwrap(), std::fs::read(&law_again).unwrap());

    let from_law = ok_json(&["eval", path_str(&law)]);
    assert_eq!(from_law["source"], "law");
    assert!(from_law["truth"].is_null());
    for key in ["complete_case", "multiple_imputation", "bounds"] {
        assert_eq!(from_law[key], direct[key], "{key}");
    }
}

#[test]
fn eval_with_params_and_infeasibility_warning() {
    let dir = tempfile::tempdir().unwrap();
    let law = dir.path().join("law.json");
    assert!(run(&["example", "--write-law", path_str(&law)]).status.success());

    let feasible = dir.path().join("feasible.json");
    std::fs::write(&feasible, r#"{"alpha": [0.05, 0.22], "beta": [0.82, 0.49]}"#).unwrap();
    let out = run(&["eval", path_str(&law), "--params", path_str(&feasible), "--json"]);
    assert!(out.status.success());
    assert!(out.stderr.is_empty());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let sa = &v["sensitivity"]["bounds"];
    assert!(sa["lb"].as_f64().unwrap() <= 0.875 && 0.875 <= sa["ub"].as_f64().unwrap());

    let infeasible = dir.path().join("infeasible.json");
    std::fs::write(&infeasible, r#"{"alpha": [0.6, 0.1], "beta": [0.9, 0.9]}"#).unwrap();
    let out = run(&["eval", path_str(&law), "--params", path_str(&infeasible)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside feasible region"));

    let unordered = dir.path().join("unordered.json");
    std::fs::write(&unordered, r#"{"alpha": [0.6, 0.1], "beta": [0.5, 0.9]}"#).unwrap();
    assert_eq!(run(&["eval", path_str(&law), "--params", path_str(&unordered)]).status.code(), Some(1));
}

#[test]
fn bad_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    let out = run(&["eval", path_str(&garbage)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let unnormalized = dir.path().join("bad.json");
    std::fs::write(
        &unnormalized,
        r#"{"u_card": 2, "p_u": [0.5, 0.6], "p_e1_given_u": [0.5, 0.5],
            "p_d1_given_eu": [[0.5, 0.5], [0.5, 0.5]], "p_r1_given_eu": [[0.5, 0.5], [0.5, 0.5]]}"#,
    )
    .unwrap();
    let out = run(&["eval", path_str(&unnormalized)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sums to"));

    assert_eq!(run(&["eval", path_str(&dir.path().join("missing.json"))]).status.code(), Some(1));
    assert_ne!(run(&["simulate", "--mechanisms", "XYZ"]).status.code(), Some(0));
    assert_eq!(run(&["simulate", "--n-draws", "10", "--u-card", "4", "--mechanisms", "MNARex"]).status.code(), Some(1));
}

#[test]
fn grid_writes_two_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let lower = dir.path().join("lower.csv");
    let upper = dir.path().join("upper.csv");
    let v = ok_json(&["grid", "--resolution", "5", "--lower", path_str(&lower), "--upper", path_str(&upper)]);
    assert_eq!(v["lower_shape"], serde_json::json!([5, 5]));
    for path in [&lower, &upper] {
        let text = std::fs::read_to_string(path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "axis1,axis2,value");
        assert_eq!(lines.len(), 26);
    }
    // First row: alpha(0) = 0, beta(1) at the low end of its axis.
    let text = std::fs::read_to_string(&lower).unwrap();
    let first: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - v["regions"][1]["beta_min"].as_f64().unwrap()).abs() == 0.0);
}

#[test]
fn simulate_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let csv = |name: &str, seed: &str, threads: &str| {
        let path = dir.path().join(name);
        let out = run(&["simulate", "--n-draws", "500", "--seed", seed, "--threads", threads, "--out", path_str(&path)]);
        assert!(out.status.success());
        std::fs::read(path).unwrap()
    };
    let a = csv("a.csv", "3", "1");
    assert_eq!(a, csv("b.csv", "3", "2"));
    assert_ne!(a, csv("c.csv", "4", "1"));
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("mechanism,method,biased,wrong_log_sign,out_bounds,both\n"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn sa_simulate_reports_factors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t2.csv");
    let v = ok_json(&["sa-simulate", "--n-draws", "300", "--factors", "1,1.3", "--out", path_str(&path)]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row["included"].as_f64(), Some(100.0));
    }
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("factor,included,lb_narrower,ub_narrower,both_narrower\n1,100,"));
    assert_eq!(run(&["sa-simulate", "--n-draws", "10", "--factors", "0"]).status.code(), Some(1));
}

#[test]
fn fuse_with_exact_confounder_distribution_under_mar() {
    // Missingness depends on E only, so p(U | E) from the complete cases is exact.
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("mar.json");
    std::fs::write(
        &model,
        r#"{"u_card": 2, "p_u": [0.3, 0.7], "p_e1_given_u": [0.2, 0.6],
            "p_d1_given_eu": [[0.1, 0.4], [0.3, 0.8]], "p_r1_given_eu": [[0.25, 0.25], [0.6, 0.6]]}"#,
    )
    .unwrap();
    let p_e1 = 0.3 * 0.2 + 0.7 * 0.6;
    let p_u_given_e = [[0.3 * 0.8 / (1.0 - p_e1), 0.7 * 0.4 / (1.0 - p_e1)], [0.3 * 0.2 / p_e1, 0.7 * 0.6 / p_e1]];
    let aux = dir.path().join("aux.json");
    std::fs::write(&aux, serde_json::json!({ "p_u_given_e": p_u_given_e }).to_string()).unwrap();

    let v = ok_json(&["fuse", path_str(&model), path_str(&aux), "--contrast", "rd"]);
    let truth = (0.3 * 0.3 + 0.7 * 0.8) - (0.3 * 0.1 + 0.7 * 0.4);
    assert!((v["estimate"].as_f64().unwrap() - truth).abs() < 1e-12);

    std::fs::write(&aux, r#"{"p_u_given_e": [[0.5, 0.6], [0.5, 0.5]]}"#).unwrap();
    assert_eq!(run(&["fuse", path_str(&model), path_str(&aux)]).status.code(), Some(1));
}

#[test]
fn sa_example_reports_true_params() {
    let v = ok_json(&["sa-example"]);
    let p = &v["true_params"];
    let got = [&p["alpha"][0], &p["alpha"][1], &p["beta"][0], &p["beta"][1]].map(round2);
    assert_eq!(got, [0.05, 0.22, 0.82, 0.49]);
    let b = &v["bounds_at_true_params"];
    assert!(b["lb"].as_f64().unwrap() <= 0.875 && 0.875 <= b["ub"].as_f64().unwrap());
}
