//! Command-line exit codes, config merging and artifacts.

use std::fs;

use hamiltonia::cli::run;

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("hamiltonia-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

#[test]
fn kepler_series_with_trees() {
    assert_eq!(run(["hamiltonia", "kepler", "series", "--order", "6", "--check-trees", "--quiet"]), 0);
}

#[test]
fn lindstedt_torus_with_flow() {
    let out = tmp("torus");
    let o = out.to_str().unwrap();
    let args = ["hamiltonia", "lindstedt", "torus", "--K", "8", "--eps", "1e-3", "--verify-flow", "--t", "10", "--quiet", "--out", o];
    assert_eq!(run(args), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("lindstedt-torus.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 1);
    assert_eq!(report["pass"], true);
    assert!(fs::read_to_string(out.join("lindstedt-torus-residual.csv")).unwrap().starts_with("eps,K,residual"));
}

#[test]
fn deprit_check_is_reproducible() {
    let (a, b) = (tmp("deprit-a"), tmp("deprit-b"));
    for dir in [&a, &b] {
        let args = ["hamiltonia", "rigidbody", "deprit-check", "--samples", "100", "--seed", "5", "--quiet", "--out", dir.to_str().unwrap()];
        assert_eq!(run(args), 0);
    }
    for f in ["rigidbody-deprit-check.json", "rigidbody-deprit-check.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tmp("config");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, "# torus settings\nK = 6\neps = 1e-3\nverify-flow = true\n").unwrap();
    let args = ["hamiltonia", "lindstedt", "torus", "--config", cfg.to_str().unwrap(), "--K", "3", "--quiet", "--out", dir.to_str().unwrap()];
    assert_eq!(run(args), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("lindstedt-torus.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["K"], 3);
    assert!(report["result"]["flow"].is_object());
    fs::write(&cfg, "no-such-flag = 1\n").unwrap();
    assert_eq!(run(["hamiltonia", "kepler", "radius", "--config", cfg.to_str().unwrap(), "--quiet"]), 2);
}

#[test]
fn verification_failure_exits_one() {
    assert_eq!(run(["hamiltonia", "canonical", "check", "--map", "scaling", "--quiet"]), 1);
    assert_eq!(run(["hamiltonia", "canonical", "check", "--map", "polar", "--quiet"]), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(["hamiltonia", "suite", "nightly"]), 2);
    assert_eq!(run(["hamiltonia", "kepler", "solve", "--e", "abc"]), 2);
    assert_eq!(run(["hamiltonia", "kepler", "solve", "--e", "1.5", "--quiet"]), 2);
    assert_eq!(run(["hamiltonia"]), 2);
}

#[test]
fn suite_fast_writes_report() {
    let dir = tmp("suite");
    let path = dir.join("report.json");
    assert_eq!(run(["hamiltonia", "suite", "fast", "--quiet", "--out", path.to_str().unwrap()]), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["outcomes"].as_array().unwrap().len(), 15);
    assert_eq!(report["unexpected_failures"].as_array().unwrap().len(), 0);
    assert_eq!(run(["hamiltonia", "suite", "fast", "--strict", "--quiet"]), 1);
}

#[test]
fn every_subcommand_runs() {
    let cases: &[&[&str]] = &[
        &["kepler", "solve"],
        &["kepler", "anomalies", "--samples", "20"],
        &["kepler", "fg"],
        &["kepler", "r3bp"],
        &["quadrature", "period"],
        &["quadrature", "action"],
        &["quadrature", "central", "--integrate"],
        &["quadrature", "modes"],
        &["quadrature", "lax", "--lattice", "calogero", "--p", "0.3,0,-0.4", "--q", "-1,0.2,1.5"],
        &["quadrature", "melnikov"],
        &["canonical", "bracket"],
        &["canonical", "generate"],
        &["rigidbody", "euler"],
        &["rigidbody", "quadratures"],
        &["rigidbody", "gyroscope"],
        &["lindstedt", "birkhoff"],
        &["lindstedt", "resonant"],
        &["lindstedt", "obstruction"],
        &["lindstedt", "resum"],
        &["lindstedt", "genfun"],
        &["trees", "enumerate"],
        &["trees", "census", "--order", "4"],
    ];
    for case in cases {
        let mut args = vec!["hamiltonia"];
        args.extend_from_slice(case);
        args.push("--quiet");
        assert_eq!(run(args.clone()), 0, "{args:?}");
    }
}
