use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn qmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmap")).args(args).env_remove("QMAP_JOBS").output().unwrap()
}

fn toy() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/toy.json")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

#[test]
fn gen_multi_target_has_n_minus_one_gates() {
    let o = qmap(&["gen", "--family", "multi_target", "--n", "50"]);
    assert!(o.status.success());
    let doc = stdout_json(&o);
    assert_eq!(doc["n"], 50);
    assert_eq!(doc["gates"].as_array().unwrap().len(), 49);
}

#[test]
fn gen_quantum_volume_is_reproducible() {
    let args = ["gen", "--family", "quantum_volume", "--n", "4", "--layers", "2", "--seed", "1"];
    let a = qmap(&args);
    let b = qmap(&args);
    assert!(a.status.success());
    assert_eq!(stdout_json(&a)["gates"].as_array().unwrap().len(), 12);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn gen_rejects_even_cuccaro() {
    let o = qmap(&["gen", "--family", "cuccaro_adder", "--n", "8"]);
    assert_eq!(o.status.code(), Some(qmap_cli::EXIT_ERROR));
    assert_eq!(stderr_json(&o)["error"], "invalid_benchmark");
}

#[test]
fn gen_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = qmap(&["gen", "--family", "qft", "--n", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let c = qmap_core::Circuit::parse(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(c.n(), 5);
}

#[test]
fn map_toy_is_valid_with_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let p = |f: &str| dir.path().join(f).to_str().unwrap().to_string();
    let o = qmap(&[
        "map",
        "--circuit",
        toy().to_str().unwrap(),
        "--topology",
        "all2all:3,2",
        "--lambda",
        "0.1",
        "--seed",
        "7",
        "--out",
        &p("r.json"),
        "--svg",
        &p("r.svg"),
        "--csv",
        &p("r.csv"),
        "--export-qubo",
        &p("q.txt"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(p("r.json")).unwrap()).unwrap();
    assert_eq!(report["valid"], true);
    assert_eq!(report["variables"], 105);
    for key in ["n", "T", "k", "lambda", "energy", "M", "transfer_count", "wall_time_s", "assignment", "transfers"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }

    let svg = std::fs::read_to_string(p("r.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

    let mut rd = csv::Reader::from_path(p("r.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][7], "true");

    let text = std::fs::read_to_string(p("q.txt")).unwrap();
    let raw = qmap_core::qubo::RawQubo::parse(&text).unwrap();
    let x = qmap_core::SolutionVector::zeros(105);
    assert!((raw.energy(&x) - 25.0).abs() < 1e-12);
}

#[test]
fn map_reports_are_reproducible() {
    let circuit = toy();
    let args = ["map", "--circuit", circuit.to_str().unwrap(), "--topology", "grid:1,3,2", "--seed", "3", "--reads", "8"];
    let strip = |o: &Output| {
        let mut v = stdout_json(o);
        v.as_object_mut().unwrap().remove("wall_time_s");
        serde_json::to_vec_pretty(&v).unwrap()
    };
    let (a, b) = (qmap(&args), qmap(&args));
    assert_eq!(a.status.code(), b.status.code());
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn map_infeasible_capacity_fails_with_error_json() {
    let o = qmap(&["map", "--circuit", toy().to_str().unwrap(), "--topology", "all2all:1,2"]);
    assert_eq!(o.status.code(), Some(qmap_cli::EXIT_ERROR));
    assert_eq!(stderr_json(&o)["error"], "infeasible_capacity");
    assert!(o.stdout.is_empty());
}

#[test]
fn map_missing_circuit_is_io_error() {
    let o = qmap(&["map", "--circuit", "/nonexistent/c.json", "--topology", "all2all:2,4"]);
    assert_eq!(o.status.code(), Some(qmap_cli::EXIT_ERROR));
    assert_eq!(stderr_json(&o)["error"], "io");
}

#[test]
fn map_exact_solver() {
    let o = qmap(&["map", "--circuit", toy().to_str().unwrap(), "--topology", "all2all:3,2", "--solver", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["M"], 7);
}

fn csv_rows(bytes: &[u8]) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut rd = csv::Reader::from_reader(bytes);
    let header = rd.headers().unwrap().clone();
    (header, rd.records().map(|r| r.unwrap()).collect())
}

#[test]
fn sweep_produces_one_row_per_run() {
    let o = qmap(&[
        "sweep", "--families", "multi_target,quantum_volume", "--n", "8,12", "--topology", "grid:2,2,4", "--reads", "8",
        "--sweeps", "200", "--jobs", "2",
    ]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&o.stdout);
    assert_eq!(
        header.iter().collect::<Vec<_>>(),
        ["family", "n", "topology", "seed", "depth", "two_qubit_gates", "lambda", "valid", "M", "relative_m", "wall_time_s", "error"]
    );
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[11].is_empty()));
}

#[test]
fn sweep_with_empty_spec_list_writes_header_only() {
    let o = qmap(&["sweep", "--families"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&o.stdout);
    assert_eq!(header.len(), 12);
    assert!(rows.is_empty());
}

#[test]
fn sweep_marks_failing_rows() {
    let o = Command::new(env!("CARGO_BIN_EXE_qmap"))
        .args(["sweep", "--families", "multi_target,cuccaro_adder", "--n", "6", "--reads", "4", "--sweeps", "100"])
        .env("QMAP_JOBS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    let (_, rows) = csv_rows(&o.stdout);
    assert_eq!(rows.len(), 2);
    assert!(rows[0][11].is_empty());
    assert!(rows[1][11].starts_with("invalid_benchmark"));
}
