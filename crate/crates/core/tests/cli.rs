use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holderlab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn decompose_three_dimensional_burgers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"flux": {"kind": "burgers_family", "d": 3}, "decompose": {"v": 0.0, "h": 1.0, "a": [0.0, 0.0, 1.0]}}),
    );
    let out = dir.path().join("o");
    let o = run(&["decompose", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(out.join("decompose.json")).unwrap()).unwrap();
    let lambda: Vec<f64> = serde_json::from_value(v["coefficients"].clone()).unwrap();
    for (got, want) in lambda.iter().zip([13.5, -13.5, 4.5]) {
        assert!((got - want).abs() < 1e-12, "{lambda:?}");
    }
}

#[test]
fn bootstrap_nondegenerate_ends_at_one_quarter() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &json!({"bootstrap": {"d": 2, "variant": "nondegenerate"}}));
    let out = dir.path().join("o");
    assert_eq!(code(&run(&["bootstrap", "--config", &cfg, "--out", out.to_str().unwrap()])), 0);
    let csv = fs::read_to_string(out.join("bootstrap.csv")).unwrap();
    assert!(csv.starts_with("n,gamma_n,C_n\n"));
    let last: f64 = csv.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((last - 0.25).abs() <= 1e-12);
}

#[test]
fn usage_and_config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&run(&["decompose", "--config", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&run(&["no-such-command"])), 1);
    assert_eq!(code(&run(&["decompose"])), 1);

    let cfg = write_config(dir.path(), "typo.json", &json!({"bootstrap": {"d": 2, "variantt": "nondegenerate"}}));
    let o = run(&["bootstrap", "--config", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bootstrap"));

    let cfg = write_config(dir.path(), "cfl.json", &json!({"solver": {
        "flux": {"kind": "burgers_family", "d": 1},
        "grid": {"cells": [16], "extent": [1.0]},
        "cfl": "fast", "final_time": 0.1,
        "initial": {"kind": "constant", "value": 0.5}
    }}));
    let o = run(&["solve", "--config", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("solver.cfl"));

    let cfg = write_config(dir.path(), "empty.json", &json!({}));
    let o = run(&["hprofile", "--config", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("hprofile"));
}

fn pipeline_config(g_bound: f64) -> Value {
    json!({
        "flux": {"kind": "burgers_family", "d": 1},
        "seed": 5,
        "output_dir": "out",
        "solver": {
            "flux": {"kind": "burgers_family", "d": 1},
            "source": {"kind": "constant", "value": 0.05},
            "grid": {"cells": [1024], "extent": [1.0]},
            "cfl": 0.8,
            "final_time": 0.2,
            "output_times": [0.0, 0.1, 0.2],
            "initial": {"kind": "fourier", "mean": 0.45, "modes": [{"amplitude": 0.2, "wavevector": [1.0]}]}
        },
        "kinetic": {"t_index": 0, "horizon": 0.2, "g_bound": g_bound,
                    "boxes": [{"center": [0.02], "radius": 0.05, "v_lower": 0.4, "width": 0.1}]},
        "hprofile": {"t_index": 2, "centers": [[0.2], [0.5]], "radii": [0.2, 0.1, 0.05, 0.02, 0.005], "geometry": "ball"},
        "holder_check": {"t_index": 2, "gamma": 0.5, "pairs": 4000}
    })
}

#[test]
fn solve_then_analyse() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &pipeline_config(0.05));
    let out = dir.path().join("out");
    assert_eq!(code(&run(&["solve", "--config", &cfg, "--threads", "2"])), 0);
    for f in ["solution.bin", "solution.json", "solution_manifest.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("solution.json")).unwrap()).unwrap();
    assert_eq!(manifest["slices"].as_array().unwrap().len(), 3);

    assert_eq!(code(&run(&["kinetic-verify", "--config", &cfg])), 0);
    let csv = fs::read_to_string(out.join("kinetic_verify.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with("true"));

    assert_eq!(code(&run(&["hprofile", "--config", &cfg])), 0);
    let csv = fs::read_to_string(out.join("hprofile.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 5);

    assert_eq!(code(&run(&["holder-check", "--config", &cfg])), 0);
    let first = fs::read(out.join("holder_check.json")).unwrap();
    assert_eq!(code(&run(&["holder-check", "--config", &cfg])), 0);
    assert_eq!(first, fs::read(out.join("holder_check.json")).unwrap());

    // a zero source bound cannot absorb the change of hypograph mass
    let strict = write_config(dir.path(), "strict.json", &pipeline_config(0.0));
    assert_eq!(code(&run(&["kinetic-verify", "--config", &strict])), 2);
}

#[test]
fn seeded_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"flux": {"kind": "burgers_family", "d": 2}, "flux_report": {"n_directions": 32}}),
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&run(&["flux-report", "--config", &cfg, "--seed", "3", "--out", a.to_str().unwrap()])), 0);
    assert_eq!(code(&run(&["flux-report", "--config", &cfg, "--seed", "3", "--out", b.to_str().unwrap()])), 0);
    for f in ["flux_report.csv", "flux_report.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
}

#[test]
fn certify_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"flux": {"kind": "burgers_family", "d": 2}, "h_certify": {"d": 2, "directional": {"v": 0.0, "ells": [1, 2]}}}),
    );
    let out = dir.path().join("o");
    assert_eq!(code(&run(&["h-certify", "--config", &cfg, "--out", out.to_str().unwrap()])), 0);
    let csv = fs::read_to_string(out.join("h_certify.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "h,norm,product");
    assert_eq!(csv.lines().count(), 14);
    assert_eq!(fs::read_to_string(out.join("h_directional.csv")).unwrap().lines().count(), 1 + 2 * 13);
}
