use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const C4: &str =
    r#"{"kind":"custom","params":{},"n_vertices":4,"edges":[[0,1],[1,2],[2,3],[0,3]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latticestop"))
        .args(args)
        .env_remove("LATTICESTOP_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn square_bounds_clear_the_reference_values() {
    let v = json(&run(&["bounds", "--lattice", "square"]));
    let row = &v[0];
    assert!(row["lower"].as_f64().unwrap() >= 0.12953);
    assert!(row["upper"].as_f64().unwrap() <= 0.13268);
    assert_eq!(row["table_lower"].as_f64().unwrap(), 0.12953);
    assert_eq!(row["table_upper"].as_f64().unwrap(), 0.13268);
    assert_eq!(run(&["bounds", "--assert"]).status.code(), Some(0));
    let csv = stdout(&run(&["bounds", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn oracle_on_the_four_cycle() {
    let dir = TempDir::new().unwrap();
    let c4 = write(dir.path(), "c4.json", C4);
    let v = json(&run(&["oracle", "--graph", &c4]));
    assert_eq!(v["blind"]["value"], "4/3");
    assert_eq!(v["blind"]["t"], 2);
    assert_eq!(v["full_value"], "4/3");
    assert_eq!(v["exact_curve"], serde_json::json!(["1", "4/3", "1", "1"]));
}

#[test]
fn oracle_size_guard() {
    let out = run(&["oracle", "--lattice", "square", "--n", "5"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn simulate_single_trial_csv() {
    let text = stdout(&run(&[
        "simulate",
        "--lattice",
        "square",
        "--n",
        "2",
        "--trials",
        "1",
        "--seed",
        "7",
    ]));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("1,1,"));
}

#[test]
fn identical_seeds_give_identical_bytes() {
    let args = [
        "simulate",
        "--lattice",
        "hexagonal",
        "--rows",
        "4",
        "--cols",
        "5",
        "--trials",
        "300",
        "--seed",
        "99",
    ];
    let a = stdout(&run(&args));
    assert_eq!(a, stdout(&run(&args)));
    let single = Command::new(env!("CARGO_BIN_EXE_latticestop"))
        .args(args)
        .env("LATTICESTOP_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a, stdout(&single));
}

#[test]
fn lattice_files_round_trip_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    for (kind, extra) in [
        ("square", vec!["--n", "4"]),
        ("triangular", vec!["--n", "4"]),
        ("hexagonal", vec!["--rows", "2", "--cols", "3"]),
    ] {
        let first = dir.path().join(format!("{kind}.json"));
        let second = dir.path().join(format!("{kind}-again.json"));
        let mut args = vec!["lattice", "--lattice", kind];
        args.extend(&extra);
        args.extend(["--out", first.to_str().unwrap()]);
        stdout(&run(&args));
        stdout(&run(&[
            "lattice",
            "--graph",
            first.to_str().unwrap(),
            "--out",
            second.to_str().unwrap(),
        ]));
        assert_eq!(
            std::fs::read(&first).unwrap(),
            std::fs::read(&second).unwrap()
        );
    }
}

#[test]
fn malformed_graph_files_exit_with_schema_code() {
    let dir = TempDir::new().unwrap();
    let dup = write(
        dir.path(),
        "dup.json",
        r#"{"kind":"c","params":{},"n_vertices":3,"edges":[[0,1],[1,0]]}"#,
    );
    let range = write(
        dir.path(),
        "range.json",
        r#"{"kind":"c","params":{},"n_vertices":3,"edges":[[0,3]]}"#,
    );
    for path in [&dup, &range] {
        let out = run(&["oracle", "--graph", path]);
        assert_eq!(out.status.code(), Some(3));
        assert!(String::from_utf8_lossy(&out.stderr).contains("$.edges["));
    }
    let missing = dir.path().join("absent.json");
    let out = run(&["oracle", "--graph", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn bad_parameters_exit_with_parameter_code() {
    let out = run(&[
        "simulate",
        "--lattice",
        "square",
        "--n",
        "2",
        "--trials",
        "0",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "percolate",
        "--lattice",
        "square",
        "--n",
        "4",
        "--trials",
        "10",
        "--seed",
        "1",
        "--p",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_latticestop"))
        .args(["bounds"])
        .env("LATTICESTOP_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_files() {
    let dir = TempDir::new().unwrap();
    let curve = dir.path().join("curve.csv");
    let blind = dir.path().join("blind.json");
    let out = run(&[
        "simulate",
        "--lattice",
        "square",
        "--n",
        "5",
        "--trials",
        "50",
        "--seed",
        "3",
        "--out",
        curve.to_str().unwrap(),
        "--blind-out",
        blind.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&curve).unwrap();
    assert!(text.starts_with("t,mean,std,ci95,trials\n"));
    assert_eq!(text.lines().count(), 26);
    let b: Value = serde_json::from_str(&std::fs::read_to_string(&blind).unwrap()).unwrap();
    assert!(b["stop_time"].as_u64().unwrap() >= 1);
}

#[test]
fn coupling_check_asserts_cleanly() {
    let v = json(&run(&[
        "coupling-check",
        "--lattice",
        "triangular",
        "--n",
        "10",
        "--trials",
        "100",
        "--seed",
        "5",
        "--t-grid",
        "10,50,90",
        "--assert",
    ]));
    assert_eq!(v["violations"], 0);
    assert_eq!(v["instances"], 300);
}

#[test]
fn concentration_and_gap_commands() {
    let v = json(&run(&[
        "concentration",
        "--lattice",
        "square",
        "--n",
        "20",
        "--trials",
        "100",
        "--seed",
        "1",
        "--p",
        "0.27",
        "--assert",
    ]));
    assert_eq!(v["passes"], true);
    let v = json(&run(&["gap", "--n-vertices", "100", "--max-degree", "4"]));
    assert_eq!(v["vacuous"], true);
}

#[test]
fn report_runs_end_to_end() {
    let v = json(&run(&[
        "report",
        "--lattice",
        "square",
        "--n",
        "60",
        "--trials",
        "100",
        "--seed",
        "2",
        "--coupling-trials",
        "20",
        "--assert",
    ]));
    assert_eq!(v["verdict"]["pass"], true);
    assert_eq!(v["coupling_violations"], 0);
    // an impossible slack turns the verdict into a failing exit
    let out = run(&[
        "report",
        "--lattice",
        "square",
        "--n",
        "4",
        "--trials",
        "20",
        "--seed",
        "2",
        "--coupling-trials",
        "5",
        "--slack",
        "0",
        "--assert",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
