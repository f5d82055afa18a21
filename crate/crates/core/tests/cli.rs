use std::path::Path;
use std::process::{Command, Output};

use swvar::experiments::{ConcentrationRow, FigswRow, ResultDocument};
use swvar::io::read_rows_csv;

fn swvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swvar")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const SMALL_FIGSW: &str = r#"{"experiment":"figsw","p_list":[10],"gamma2_list":[1.0],"m_list":[1,5],"replications":3}"#;

#[test]
fn simulate_fit_dependence() {
    let dir = tempfile::tempdir().unwrap();
    let model = r#"{"coeffs":[[[0.5,0.1],[0.0,0.3]]],"gamma2":1.0,"horizon":300,"burn_in":100}"#;
    let sim_cfg = write(dir.path(), "sim.json", model);
    let traj = dir.path().join("traj.csv");
    let out = swvar(&["simulate", "--config", &sim_cfg, "--seed", "4", "--out", traj.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&traj).unwrap().lines().count(), 302);

    let fit_cfg = write(dir.path(), "fit.json", r#"{"d":1,"lambda":{"rule":"fixed","lambda":0.001}}"#);
    let out = swvar(&["fit", "--config", &fit_cfg, "--data", traj.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let fit: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(fit["coeffs"].is_object() || fit["coeffs"].is_array());

    let dep_cfg = write(dir.path(), "dep.json", r#"{"coeffs":[[[0.5,0.1],[0.0,0.3]]],"grid":64}"#);
    let out = swvar(&["dependence", "--config", &dep_cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rep["c_factor"].as_f64().unwrap() >= 1.0);
    assert!((rep["rho"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn simulation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "sim.json", r#"{"coeffs":[[[0.4]]],"gamma2":0.5,"horizon":50}"#);
    let a = swvar(&["simulate", "--config", &cfg, "--seed", "11"]);
    let b = swvar(&["simulate", "--config", &cfg, "--seed", "11"]);
    let c = swvar(&["simulate", "--config", &cfg, "--seed", "12"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"coeffs":[[[0.4]]],"gamma2":0.5,"horizon":50,"typo":1}"#);
    assert_eq!(swvar(&["simulate", "--config", &bad]).status.code(), Some(2));

    let gamma = write(dir.path(), "gamma.json", r#"{"coeffs":[[[0.4]]],"gamma2":-1.0,"horizon":50}"#);
    assert_eq!(swvar(&["simulate", "--config", &gamma]).status.code(), Some(2));

    let unstable = write(dir.path(), "unstable.json", r#"{"coeffs":[[[1.1]]],"gamma2":1.0,"horizon":50}"#);
    let out = swvar(&["simulate", "--config", &unstable]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unstable"));

    let missing = dir.path().join("nope.json");
    assert_eq!(swvar(&["simulate", "--config", missing.to_str().unwrap()]).status.code(), Some(1));

    let wrong_kind = write(dir.path(), "exp.json", SMALL_FIGSW);
    assert_eq!(swvar(&["experiment", "ls-tables", "--config", &wrong_kind]).status.code(), Some(2));
}

#[test]
fn figsw_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "exp.json", SMALL_FIGSW);
    let csv = swvar(&["experiment", "figsw", "--config", &cfg, "--seed", "3"]);
    assert!(csv.status.success(), "{}", String::from_utf8_lossy(&csv.stderr));
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "p,gamma2,m,n,mean_err,std_err");
    let rows: Vec<FigswRow> = read_rows_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 2);

    let json = swvar(&["experiment", "figsw", "--config", &cfg, "--seed", "3", "--format", "json"]);
    let doc: ResultDocument<Vec<FigswRow>> = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(doc.config_hash.len(), 64);
    assert_eq!(doc.config.base_seed, 3);
    // CSV and JSON carry the same numbers.
    assert_eq!(doc.rows, rows);

    let other = swvar(&["experiment", "figsw", "--config", &cfg, "--seed", "4", "--format", "json"]);
    let doc2: ResultDocument<Vec<FigswRow>> = serde_json::from_slice(&other.stdout).unwrap();
    assert_ne!(doc.config_hash, doc2.config_hash);
}

#[test]
fn concentration_tails_are_valid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "conc.json",
        r#"{"experiment":"concentration","p_list":[4],"gamma2_list":[1.0],"n_list":[100],"replications":1000}"#,
    );
    let out = swvar(&["experiment", "concentration", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Vec<ConcentrationRow> = read_rows_csv(out.stdout.as_slice()).unwrap();
    assert!(!rows.is_empty());
    for pair in rows.windows(2) {
        for r in pair {
            assert!((0.0..=1.0).contains(&r.empirical));
            assert!(r.bound >= r.empirical);
        }
        if pair[0].statistic == pair[1].statistic && pair[1].t > pair[0].t {
            assert!(pair[1].empirical <= pair[0].empirical);
        }
    }
}
