//! End-to-end checks of the command-line interface: determinism, exit
//! codes, header provenance and config-file handling.

use std::process::{Command, Output};

fn qcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcs"))
        .args(args)
        .output()
        .expect("binary should run")
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        vec!["amps", "--n", "6", "--seed", "7"],
        vec!["state", "--kind", "random-singlet", "--n", "6", "--seed", "3"],
        vec![
            "pipeline", "--n", "4", "--phi", "0.4", "--shots", "500", "--seed", "11",
        ],
        vec!["sweep", "--kind", "error", "--grid", "5"],
    ] {
        let a = qcs(&args);
        let b = qcs(&args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?} not deterministic");
    }
}

#[test]
fn seeds_change_sampled_output() {
    let a = qcs(&["pipeline", "--n", "4", "--shots", "500", "--seed", "1"]);
    let b = qcs(&["pipeline", "--n", "4", "--shots", "500", "--seed", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    // bad arguments -> 2
    assert_eq!(qcs(&["amps", "--n", "3"]).status.code(), Some(2));
    assert_eq!(qcs(&["state", "--kind", "dicke", "--n", "4"]).status.code(), Some(2));
    assert_eq!(qcs(&["amps", "--n", "40"]).status.code(), Some(2));
    assert_eq!(
        qcs(&["pipeline", "--n", "4", "--t", "7.0"]).status.code(),
        Some(2)
    );
    // indeterminate sector check (too few samples near zz = 0) -> 3
    let out = qcs(&[
        "pipeline",
        "--n",
        "4",
        "--phi",
        "1.5707963267948966",
        "--check-shots",
        "10",
        "--shots",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn csv_carries_provenance_header() {
    let out = qcs(&["amps", "--n", "4", "--seed", "9"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# version="));
    assert!(lines[1].starts_with("# command="));
    assert!(lines[1].contains("--seed 9"));
    assert_eq!(lines[2], "# seed=9");
    assert_eq!(lines[3], "party,group,direct,correlation,postprocessed,closed_form");
    assert_eq!(lines.len(), 4 + 3);
}

#[test]
fn json_carries_provenance_fields() {
    let out = qcs(&["amps", "--n", "4", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["version"].is_string());
    assert!(doc["command"].as_str().unwrap().contains("amps"));
    assert_eq!(doc["seed"], 0);
    assert!((doc["data"]["sum"].as_f64().unwrap() + 1.0).abs() < 1e-10);
}

#[test]
fn config_file_supplies_defaults_but_flags_win() {
    let dir = std::env::temp_dir().join(format!("qcs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "n=6\nseed=5\n# comment\n").unwrap();
    let from_cfg = qcs(&["amps", "--config", cfg.to_str().unwrap()]);
    assert!(from_cfg.status.success());
    let text = String::from_utf8(from_cfg.stdout).unwrap();
    assert!(text.contains("# seed=5"));
    assert_eq!(text.lines().count(), 4 + 5); // six qubits -> five parties
    let overridden = qcs(&["amps", "--config", cfg.to_str().unwrap(), "--n", "4"]);
    assert!(overridden.status.success());
    let text = String::from_utf8(overridden.stdout).unwrap();
    assert_eq!(text.lines().count(), 4 + 3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn state_output_round_trips() {
    let out = qcs(&["state", "--kind", "supersinglet", "--n", "4"]);
    assert!(out.status.success());
    let state = qcs::state::StateVector::from_json(&String::from_utf8(out.stdout).unwrap())
        .expect("state JSON should parse despite provenance fields");
    assert_eq!(state.n_qubits(), 4);
    assert!(qcs::spin::singlet_residual(&state) < 1e-10);
}
