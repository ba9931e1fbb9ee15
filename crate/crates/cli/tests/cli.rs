use std::path::Path;
use std::process::{Command, Output};

use rae_core::{allocate, parse_hamiltonian, NoiseModel, RuntimeModelParams, RuntimePrediction};

fn raest(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raest"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn files_in(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

const EXAMPLE: &str = "0.5 ZZ\n-0.25 XI\n-0.25 IX\n";
/// Circuit cost models need at least four qubits.
const FOUR_QUBIT: &str = "0.5 ZZII\n-0.25 XIIX\n-0.25 IXYI\n0.1 IIIZ\n";

#[test]
fn simulate_is_deterministic_and_shaped() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str, traces: &'static str| {
        [
            "simulate",
            "--pi",
            "0.6",
            "--layer-fidelity",
            "0.999",
            "--trials",
            "12",
            "--steps",
            "40",
            "--seed",
            "1",
            "--trim",
            "0.1",
            "--out",
            out,
            "--traces",
            traces,
        ]
    };
    assert!(raest(dir.path(), &args("a.csv", "ta.csv")).status.success());
    assert!(raest(dir.path(), &args("b.csv", "tb.csv")).status.success());
    let read = |f: &str| std::fs::read_to_string(dir.path().join(f)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("ta.csv"), read("tb.csv"));
    let curve = read("a.csv");
    assert!(curve.lines().next().unwrap().split(',').any(|c| c == "trim_fraction"));
    assert_eq!(curve.lines().count(), 41);
    assert_eq!(read("ta.csv").lines().count(), 12 * 40 + 1);

    let other = raest(
        dir.path(),
        &[
            "simulate",
            "--pi",
            "0.6",
            "--layer-fidelity",
            "0.999",
            "--trials",
            "12",
            "--steps",
            "40",
            "--seed",
            "2",
            "--out",
            "c.csv",
        ],
    );
    assert!(other.status.success());
    assert_ne!(read("a.csv"), read("c.csv"));
}

#[test]
fn invalid_fidelity_exits_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = raest(
        dir.path(),
        &["simulate", "--pi", "0.6", "--layer-fidelity", "1.5", "--out", "x.csv"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert!(files_in(dir.path()).is_empty());
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(raest(dir.path(), &["--help"]).status.code(), Some(0));
    assert_eq!(raest(dir.path(), &["sweep", "--help"]).status.code(), Some(0));
    assert_eq!(raest(dir.path(), &[]).status.code(), Some(1));
    assert_eq!(raest(dir.path(), &["sweep", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        raest(dir.path(), &["sweep", "--hamiltonian", "missing.txt"])
            .status
            .code(),
        Some(1)
    );
    std::fs::write(dir.path().join("h.txt"), EXAMPLE).unwrap();
    let bad_range = raest(
        dir.path(),
        &["sweep", "--hamiltonian", "h.txt", "--d-min", "30", "--d-max", "10"],
    );
    assert_eq!(bad_range.status.code(), Some(1));
    let odd = raest(dir.path(), &["sweep", "--hamiltonian", "h.txt", "--connectivity", "3d"]);
    assert_eq!(odd.status.code(), Some(1));
}

#[test]
fn runtime_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("h.txt"), FOUR_QUBIT).unwrap();
    let unreachable = raest(
        dir.path(),
        &["estimate", "--hamiltonian", "h.txt", "--gate-error", "1e-40"],
    );
    assert_eq!(unreachable.status.code(), Some(2));
    let unwritable = raest(
        dir.path(),
        &["sweep", "--hamiltonian", "h.txt", "--out", "no/such/dir/s.csv"],
    );
    assert_eq!(unwritable.status.code(), Some(2));
    assert_eq!(files_in(dir.path()), ["h.txt"]);
}

#[test]
fn allocate_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("h.txt"), EXAMPLE).unwrap();
    let text = stdout(&raest(
        dir.path(),
        &[
            "allocate",
            "--hamiltonian",
            "h.txt",
            "--lambda",
            "1e-3",
            "--format",
            "json",
        ],
    ));
    let got: serde_json::Value = serde_json::from_str(&text).unwrap();
    let h = parse_hamiltonian(EXAMPLE).unwrap();
    let params = RuntimeModelParams::in_layers(&NoiseModel::new(1e-3, 1.0).unwrap()).unwrap();
    let want = allocate(&h, 1e-3, &params).unwrap();
    let close = |v: &serde_json::Value, x: f64| (v.as_f64().unwrap() - x).abs() <= 1e-8 * x.abs();
    assert!(close(&got["multiplier"], want.multiplier));
    assert!(close(&got["total_runtime"], want.total_runtime));
    assert_eq!(got["terms"].as_array().unwrap().len(), 3);

    let csv = stdout(&raest(
        dir.path(),
        &["allocate", "--hamiltonian", "h.txt", "--lambda", "1e-3"],
    ));
    assert!(csv.lines().any(|l| l.starts_with("Lambda,")));
    assert!(csv.lines().any(|l| l.starts_with("T_star,")));
    assert_eq!(std::fs::read_to_string(dir.path().join("h.txt")).unwrap(), EXAMPLE);
}

#[test]
fn sweep_row_count_and_config_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("h.txt"), FOUR_QUBIT).unwrap();
    let csv = stdout(&raest(
        dir.path(),
        &["sweep", "--hamiltonian", "h.txt", "--d-min", "3", "--d-max", "25"],
    ));
    assert_eq!(csv.lines().count(), 24);
    assert_eq!(csv.lines().next().unwrap(), rae_core::pipeline::SWEEP_CSV_HEADER);

    std::fs::write(
        dir.path().join("run.json"),
        r#"{"command": "sweep", "hamiltonian": "h.txt", "d-min": 5, "d_max": 20, "connectivity": "2d"}"#,
    )
    .unwrap();
    let from_file = stdout(&raest(dir.path(), &["--config", "run.json", "sweep"]));
    assert_eq!(from_file.lines().count(), 17);
    let overridden = stdout(&raest(dir.path(), &["sweep", "--config", "run.json", "--d-max", "9"]));
    assert_eq!(overridden.lines().count(), 6);

    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"hamiltonian": "h.txt", "d-maximum": 9}"#,
    )
    .unwrap();
    assert_eq!(
        raest(dir.path(), &["sweep", "--config", "bad.json"]).status.code(),
        Some(1)
    );
    std::fs::write(dir.path().join("other.json"), r#"{"command": "fit"}"#).unwrap();
    assert_eq!(
        raest(dir.path(), &["sweep", "--config", "other.json"]).status.code(),
        Some(1)
    );
}

#[test]
fn fit_recovers_exact_law() {
    let dir = tempfile::tempdir().unwrap();
    let rows: String = (8..=64)
        .step_by(8)
        .map(|n| format!("{n},{}\n", 3 * n * n + 5))
        .collect();
    std::fs::write(dir.path().join("p.csv"), format!("N,y\n{rows}")).unwrap();
    let csv = stdout(&raest(dir.path(), &["fit", "--input", "p.csv", "--target", "104"]));
    let line = csv.lines().nth(1).unwrap();
    assert_eq!(line, "3,2,5,0,8,false,104,32453");
}

fn write_series(dir: &Path) {
    for (n, terms) in [(4, 12), (6, 24), (8, 40)] {
        let out = raest(
            dir,
            &[
                "synthesize",
                "--qubits",
                &n.to_string(),
                "--terms",
                &terms.to_string(),
                "--scale",
                "0.4",
                "--out",
                &format!("h{n}.txt"),
            ],
        );
        assert!(out.status.success());
    }
    std::fs::write(
        dir.join("series.json"),
        r#"[{"label": "a", "hamiltonians": ["h4.txt", "h6.txt", "h8.txt"], "target_qubits": 10},
            {"label": "b", "hamiltonians": ["h4.txt", "h8.txt"]},
            {"label": "c", "hamiltonians": ["h6.txt"]}]"#,
    )
    .unwrap();
}

/// Field names and JSON types of a report entry.
const REPORT_SCHEMA: &[(&str, &str)] = &[
    ("label", "string"),
    ("logical_qubits", "integer"),
    ("vqe_physical_qubits", "integer"),
    ("rae_physical_qubits", "integer"),
    ("vqe_code_distance", "integer"),
    ("rae_code_distance", "integer"),
    ("vqe_optimal_gate_error", "number"),
    ("rae_optimal_gate_error", "number"),
    ("crossover_gate_error", "number|null"),
    ("vqe_runtime_s", "number"),
    ("rae_runtime_s", "number"),
    ("runtime_ratio", "number"),
    ("rae_parallel_runtime_s", "number"),
    ("rae_layer_fidelity", "number"),
];

fn matches_type(v: &serde_json::Value, ty: &str) -> bool {
    ty.split('|').any(|t| match t {
        "string" => v.is_string(),
        "integer" => v.is_u64(),
        "number" => v.is_number(),
        "null" => v.is_null(),
        _ => false,
    })
}

#[test]
fn report_validates_against_schema() {
    let dir = tempfile::tempdir().unwrap();
    write_series(dir.path());
    let out = raest(dir.path(), &["report", "--series", "series.json", "--out", "r.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("r.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let entries = value.as_array().unwrap();
    assert_eq!(entries.len(), 3);
    for e in entries {
        let obj = e.as_object().unwrap();
        assert_eq!(obj.len(), REPORT_SCHEMA.len());
        for (key, ty) in REPORT_SCHEMA {
            assert!(matches_type(&obj[*key], ty), "{key}: {}", obj[*key]);
        }
    }
    assert_eq!(entries[0]["logical_qubits"], 10);
    assert_eq!(entries[1]["logical_qubits"], 8);
    assert_eq!(entries[2]["logical_qubits"], 6);
    let typed: Vec<RuntimePrediction> = serde_json::from_str(&text).unwrap();
    assert!(typed.iter().all(|r| r.rae_parallel_runtime_s <= r.rae_runtime_s));

    let csv = stdout(&raest(
        dir.path(),
        &["report", "--series", "series.json", "--format", "csv"],
    ));
    assert_eq!(csv.lines().count(), 4);

    std::fs::write(
        dir.path().join("bad.json"),
        r#"[{"label": "a", "hamiltonians": ["h4.txt"], "extra": 1}]"#,
    )
    .unwrap();
    assert_eq!(
        raest(dir.path(), &["report", "--series", "bad.json"]).status.code(),
        Some(1)
    );
}

#[test]
fn validate_model_default_grid_shape() {
    let dir = tempfile::tempdir().unwrap();
    let csv = stdout(&raest(dir.path(), &["validate-model", "--trials", "8"]));
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let ratio = header.iter().position(|&c| c == "ratio").unwrap();
    let (pi, fid) = (0, 1);
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let mut groups: Vec<(&str, &str)> = rows.iter().map(|r| (r[pi], r[fid])).collect();
    groups.dedup();
    assert_eq!(groups.len(), 21);
    for r in &rows {
        let x: f64 = r[ratio].parse().unwrap();
        assert!(x.is_finite() && x > 0.0);
    }
}

#[test]
fn estimate_at_distance_matches_sweep_row() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("h.txt"), FOUR_QUBIT).unwrap();
    let sweep = stdout(&raest(dir.path(), &["sweep", "--hamiltonian", "h.txt"]));
    let est = stdout(&raest(
        dir.path(),
        &["estimate", "--hamiltonian", "h.txt", "--distance", "11"],
    ));
    let row = est.lines().nth(1).unwrap();
    assert!(sweep.lines().any(|l| l == row));
    let by_error = stdout(&raest(
        dir.path(),
        &["estimate", "--hamiltonian", "h.txt", "--gate-error", "1.3e-5"],
    ));
    assert!(by_error.lines().nth(1).unwrap().starts_with("13,"));
}
