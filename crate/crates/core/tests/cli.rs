use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn extkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extkit"))
        .args(args)
        .env_remove("EXTKIT_SEED")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn list_and_show() {
    let out = extkit(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in [
        "quartic1",
        "quartic2a",
        "quartic2b",
        "square_polar",
        "vortex_equal",
        "vortex_opposite",
        "euler_top",
        "lotka_volterra",
    ] {
        assert!(text.contains(id), "{id}");
    }
    let out = extkit(&["show", "--system", "quartic1"]);
    assert!(out.status.success());
    assert!(json(&out).is_object());
    assert_eq!(extkit(&["show", "--system", "nope"]).status.code(), Some(2));
}

#[test]
fn gn_compare_passes() {
    let out = extkit(&["gn-compare", "--n-max", "8", "--samples", "200", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["metrics"]["max_rel_err"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn invalid_input_exits_2() {
    let out = extkit(&["check-pde", "--system", "lotka_volterra"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("has no G solution"));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        r#"{"system": "quartic1", "sampling": {"cnt": 3}}"#,
    );
    assert_eq!(extkit(&["check-pde", "--config", &cfg]).status.code(), Some(2));
    assert_eq!(extkit(&["check-pde"]).status.code(), Some(2));
    assert_eq!(extkit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        extkit(&["check-pde", "--system", "quartic1", "--params", r#"{"zz": 1}"#])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn failing_gate_exits_1_and_names_the_point() {
    let out = extkit(&["check-pde", "--system", "quartic1", "--tol", "1e-30", "--count", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    let gate = r["gates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|g| g["name"] == "pde_residual")
        .unwrap();
    assert_eq!(gate["pass"], false);
    assert!(gate["at"].as_array().is_some_and(|a| a.len() == 2));
}

#[test]
fn check_pde_report_schema() {
    let out = extkit(&["check-pde", "--system", "vortex_equal", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["command"], "check-pde");
    for key in ["config_echo", "metrics", "gates", "skipped_points"] {
        assert!(r.get(key).is_some(), "{key}");
    }
    for g in r["gates"].as_array().unwrap() {
        for key in ["name", "value", "tol", "pass"] {
            assert!(g.get(key).is_some());
        }
    }
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"system": "quartic1", "extension": {"c": 1.0, "C": -1.0, "m": 2}, "sampling": {"count": 10, "seed": 11}}"#,
    );
    for args in [
        vec!["check-pde", "--config", &cfg],
        vec!["bracket", "--config", &cfg],
        vec!["rank", "--config", &cfg],
        vec!["extend", "--config", &cfg],
    ] {
        let a = extkit(&args);
        let b = extkit(&args);
        assert_eq!(
            a.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn seed_precedence() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_extkit"));
        cmd.args(["check-pde", "--system", "quartic1", "--count", "5"]);
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        match env {
            Some(e) => cmd.env("EXTKIT_SEED", e),
            None => cmd.env_remove("EXTKIT_SEED"),
        };
        cmd.output().unwrap()
    };
    let env3 = run(Some("3"), None);
    let flag3 = run(None, Some("3"));
    let flag_wins = run(Some("9"), Some("3"));
    let default = run(None, None);
    assert_eq!(env3.stdout, flag3.stdout);
    assert_eq!(flag_wins.stdout, flag3.stdout);
    assert_ne!(default.stdout, flag3.stdout);
    assert_eq!(run(Some("x"), None).status.code(), Some(2));
}

#[test]
fn integrate_writes_csv_and_drifts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let cfg = write(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{"system": "vortex_opposite", "extension": {{"m": 2, "n": 1}},
                "state": [0.3, 0.2, 0.4, 0.3, -0.2, 0.5],
                "integration": {{"t_final": 1.0}}, "output": {{"csv": "{}"}}}}"#,
            csv.display()
        ),
    );
    let out = extkit(&["integrate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,u,p_u,X1t,Y1t,X2t,Y2t,H,L,K_re,K_im");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1001);
    assert!(rows.iter().all(|r| r.split(',').count() == 11));
    let r = json(&out);
    let names: Vec<&str> = r["gates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| g["name"].as_str().unwrap())
        .collect();
    assert!(names.iter().any(|n| n.contains("H")), "{names:?}");
    assert!(r["gates"].as_array().unwrap().iter().all(|g| g["pass"] == true));
}

#[test]
fn report_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = extkit(&[
        "check-pde",
        "--system",
        "square_polar",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
}

#[test]
fn check_kn_on_euler_top() {
    let out = extkit(&["check-kn", "--system", "euler_top"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert!(!r["skipped_points"].as_array().unwrap().is_empty());
}
