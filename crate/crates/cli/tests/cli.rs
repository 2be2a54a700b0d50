use std::path::Path;
use std::process::{Command, Output};

use korn_lab::{run, ExperimentConfig, ExperimentKind, RunSettings};

fn korn_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_korn-lab")).args(args).env_remove("KORNLAB_THREADS").output().unwrap()
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn list_experiments_names_all_six() {
    let out = korn_lab(&["list-experiments"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for k in ExperimentKind::ALL {
        assert!(text.contains(k.name()), "{text}");
    }
}

#[test]
fn p_one_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p1.json", r#"{"experiment": "ansatz_sweep", "p": 1}"#);
    for args in [vec!["validate", "--config", &cfg], vec!["run", "--config", &cfg]] {
        let out = korn_lab(&args);
        assert_eq!(out.status.code(), Some(2));
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains("p must lie in (1, ∞)") && err.contains("`p`"), "{err}");
    }
}

#[test]
fn config_errors_carry_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", r#"{"experiment": "subdivision", "h_ladder": [0.1, 0.2]}"#);
    let out = korn_lab(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("h_ladder[1]"));
    assert_eq!(korn_lab(&["run", "--config", "/nonexistent/config.json"]).status.code(), Some(2));
    assert_eq!(korn_lab(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn assertion_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "coarse.json",
        r#"{"experiment": "ansatz_sweep", "h_ladder": [0.1, 0.0125],
            "resolution": {"quadrature": {"n_theta": 2, "n_z": 2, "n_t": 1}}}"#,
    );
    let out_dir = dir.path().join("out");
    let out = korn_lab(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL interpolation_ratio band"));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("ansatz_sweep.report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
    let failed = report["assertions"].as_array().unwrap().iter().find(|a| a["passed"] == false).unwrap();
    assert!(failed["lhs"].as_f64().unwrap() > failed["rhs"].as_f64().unwrap());
    assert!(failed["inequality"].as_str().unwrap().contains("max/min"));
}

#[test]
fn numeric_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "tiny.json",
        r#"{"experiment": "korn2_scaling", "resolution": {"nodal": {"n_theta": 1, "n_z": 1, "n_t": 1}}}"#,
    );
    let out = korn_lab(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("Korn constant at h = 0.1"));
}

#[test]
fn run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg =
        write_config(dir.path(), "sub.json", r#"{"experiment": "subdivision", "h_ladder": [0.1, 0.05], "seed": 4}"#);
    let out_dir = dir.path().join("out");
    let out =
        korn_lab(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap(), "--threads", "2", "--dump-gradient"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "subdivision.csv",
        "subdivision.report.json",
        "subdivision_plot.csv",
        "subdivision_plot.svg",
        "subdivision_gradient.csv",
    ] {
        assert!(out_dir.join(f).is_file(), "missing {f}");
    }
    let csv = std::fs::read_to_string(out_dir.join("subdivision.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("4,")));
    let svg = std::fs::read_to_string(out_dir.join("subdivision_plot.svg")).unwrap();
    assert!(svg.contains("seed: 4"));
}

#[test]
fn lemma44_seed_seven_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "l44.json", r#"{"experiment": "lemma44_sweep", "seed": 7}"#);
    let bytes: Vec<Vec<u8>> = ["a", "b"]
        .iter()
        .map(|sub| {
            let out_dir = dir.path().join(sub);
            assert!(korn_lab(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]).status.success());
            std::fs::read(out_dir.join("lemma44_sweep.csv")).unwrap()
        })
        .collect();
    assert_eq!(bytes[0], bytes[1]);
    assert_eq!(String::from_utf8_lossy(&bytes[0]).lines().count(), 102);
}

#[test]
fn seed_changes_random_cases() {
    let dir = tempfile::tempdir().unwrap();
    let csv = |seed: u64| {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Lemma44Sweep);
        cfg.seed = seed;
        cfg.cases = Some(5);
        let out = dir.path().join(seed.to_string());
        run(&cfg, &RunSettings::default(), Some(&out)).unwrap();
        std::fs::read_to_string(out.join("lemma44_sweep.csv")).unwrap()
    };
    let (a, b) = (csv(1), csv(2));
    let body = |s: &str| s.lines().skip(2).map(|l| l.split_once(',').unwrap().1.to_string()).collect::<Vec<_>>();
    assert_ne!(body(&a), body(&b));
}

#[test]
fn resolution_scale_refines_grids() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(ExperimentKind::Extension);
    cfg.resolution.box_cells = Some(8);
    let settings = RunSettings { resolution_scale: 2.0, dump_gradient: false };
    let report = run(&cfg, &settings, Some(dir.path())).unwrap();
    assert!(report.passed);
    assert!(report.cases.as_array().unwrap().iter().all(|row| row["cells"] == 16));
    let bad = RunSettings { resolution_scale: 0.0, dump_gradient: false };
    assert_eq!(run(&cfg, &bad, Some(dir.path())).unwrap_err().exit_code(), 2);
}
