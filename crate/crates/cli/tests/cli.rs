use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn scenario() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/paper-table2.json")
}

fn vnfperf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vnfperf"))
        .arg("--output-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

/// Same header, same shape, every numeric cell within `rel` of the golden one.
fn assert_csv_matches(got: &Path, want: &Path, rel: f64) {
    let (h1, r1) = read_csv(got);
    let (h2, r2) = read_csv(want);
    assert_eq!(h1, h2, "header of {}", got.display());
    assert_eq!(r1.len(), r2.len());
    for (a, b) in r1.iter().zip(&r2) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(x), Ok(y)) => assert!((x - y).abs() <= rel * y.abs().max(1e-300), "{x} vs {y}"),
                _ => assert_eq!(x, y),
            }
        }
    }
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn solve_tandem_values() {
    let dir = TempDir::new().unwrap();
    let out = vnfperf(dir.path(), &["solve", path(&data("tandem.json")), "--method", "both"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for m in ["qna", "jackson"] {
        let (header, rows) = read_csv(&dir.path().join(format!("solve-{m}-queues.csv")));
        assert_eq!(header, ["queue_id", "stage", "lambda", "ca2", "rho", "W", "sojourn", "V"]);
        for row in rows {
            let v: Vec<f64> = row.iter().map(|c| c.parse().unwrap()).collect();
            assert_eq!(&v[2..], &[1.0, 1.0, 0.5, 0.5, 1.0, 1.0]);
        }
        let s = json(&dir.path().join(format!("solve-{m}-summary.json")));
        assert_eq!(s["T"].as_f64().unwrap(), 2.0);
        assert_eq!(s["method"], m);
        assert!(s["wall_time"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn solve_matches_golden_files() {
    let dir = TempDir::new().unwrap();
    let out = vnfperf(dir.path(), &["solve", path(&data("mixed.json")), "--method", "both"]);
    assert!(out.status.success());
    assert_csv_matches(&dir.path().join("solve-qna-queues.csv"), &golden("mixed-qna-queues.csv"), 1e-8);
    assert_csv_matches(&dir.path().join("solve-jackson-queues.csv"), &golden("mixed-jackson-queues.csv"), 1e-8);
}

#[test]
fn sweep_matches_golden_file() {
    let dir = TempDir::new().unwrap();
    let out = vnfperf(dir.path(), &["sweep", path(&scenario()), "--users", "1e5,5e5,1e6,2e6"]);
    assert!(out.status.success());
    assert_csv_matches(&dir.path().join("sweep.csv"), &golden("table2-sweep.csv"), 1e-8);
    let (_, rows) = read_csv(&dir.path().join("sweep.csv"));
    let k: Vec<u64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(k.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn explain_adds_intermediates() {
    let dir = TempDir::new().unwrap();
    let out = vnfperf(dir.path(), &["solve", path(&data("mixed.json")), "--explain"]);
    assert!(out.status.success());
    let s = json(&dir.path().join("solve-qna-summary.json"));
    for key in ["q", "gamma", "omega", "x", "a", "b", "arrival_scv", "lambda"] {
        assert!(s["explain"][key].is_array(), "missing {key}");
    }
    assert_eq!(s["explain"]["b"].as_array().unwrap().len(), 3);
}

#[test]
fn scenario_jackson_is_slower_than_qna() {
    let dir = TempDir::new().unwrap();
    let out = vnfperf(dir.path(), &["--format", "json", "solve", path(&scenario()), "--method", "both"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let t = |i: usize| v[i]["T"].as_f64().unwrap();
    assert_eq!(v[0]["method"], "qna");
    assert!(t(1) > t(0));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let code = |args: &[&str]| vnfperf(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["validate", path(&data("tandem.json"))]), 0);
    assert_eq!(code(&["validate", path(&data("invalid.json"))]), 1);
    assert_eq!(code(&["solve", path(&data("invalid.json"))]), 1);
    assert_eq!(code(&["solve", path(&data("missing.json"))]), 1);
    assert_eq!(code(&["solve", path(&data("unstable.json"))]), 2);
    assert_eq!(code(&["solve", path(&data("unstable.json")), "--method", "jackson"]), 2);
    assert_eq!(code(&["sweep", path(&data("tandem.json")), "--users", "1"]), 1);
    assert_eq!(code(&["sweep", path(&scenario()), "--users", "x"]), 1);
}

#[test]
fn unstable_names_the_queue() {
    let dir = TempDir::new().unwrap();
    let out = vnfperf(dir.path(), &["solve", path(&data("unstable.json"))]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("queue 2"), "{err}");
}

#[test]
fn overload_diverges_with_exit_3() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(data("tandem.json")).unwrap().replace("\"ext_arrival_rate\": 1.0", "\"ext_arrival_rate\": 4.0");
    let file = dir.path().join("overload.json");
    fs::write(&file, text).unwrap();
    assert_eq!(vnfperf(dir.path(), &["solve", path(&file)]).status.code(), Some(2));
    let out = vnfperf(dir.path(), &["simulate", path(&file), "--packets", "100000", "--queue-cap", "1000"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn malformed_json_names_the_field() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("\"service_rate\": 2.0, \"service_scv\": 1.0,\n     \"ext_arrival_rate\": 1.0", "\"service_rate\": \"two\", \"service_scv\": 1.0,\n     \"ext_arrival_rate\": 1.0", "service_rate"),
        ("\"multiplier\": 1.0}", "\"multiplier\": 1.0, \"colour\": 3}", "colour"),
        ("\"routing\"", "\"routeing\"", "routeing"),
    ];
    let original = fs::read_to_string(data("tandem.json")).unwrap();
    for (from, to, field) in cases {
        let text = original.replacen(from, to, 1);
        assert_ne!(text, original);
        let file = dir.path().join("bad.json");
        fs::write(&file, text).unwrap();
        let out = vnfperf(dir.path(), &["solve", path(&file)]);
        assert_eq!(out.status.code(), Some(1));
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(field), "{err}");
    }
    let file = dir.path().join("truncated.json");
    fs::write(&file, "{\"queues\": [").unwrap();
    assert_eq!(vnfperf(dir.path(), &["validate", path(&file)]).status.code(), Some(1));
}

#[test]
fn manifest_lists_every_output_once() {
    let dir = TempDir::new().unwrap();
    assert!(vnfperf(dir.path(), &["solve", path(&data("mixed.json")), "--method", "both"]).status.success());
    assert!(vnfperf(dir.path(), &["simulate", path(&data("mixed.json")), "--packets", "20000", "--trace", "50"])
        .status
        .success());
    assert!(vnfperf(dir.path(), &["compare", path(&data("mixed.json"))]).status.success());
    let mut referenced = Vec::new();
    for cmd in ["solve", "simulate", "compare"] {
        let m = json(&dir.path().join(format!("{cmd}-manifest.json")));
        assert_eq!(m["command"], cmd);
        assert_eq!(m["input_sha256"].as_str().unwrap().len(), 64);
        assert_eq!(m["seed"], 1);
        assert!(m["version"].is_string());
        for o in m["outputs"].as_array().unwrap() {
            referenced.push(o.as_str().unwrap().to_string());
        }
    }
    let mut files: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| !n.ends_with("-manifest.json"))
        .collect();
    files.sort();
    referenced.sort();
    assert_eq!(files, referenced);
}

#[test]
fn trace_schema() {
    let dir = TempDir::new().unwrap();
    assert!(vnfperf(dir.path(), &["simulate", path(&data("tandem.json")), "--packets", "1000", "--trace", "20"])
        .status
        .success());
    let (header, rows) = read_csv(&dir.path().join("simulate-trace.csv"));
    assert_eq!(header, ["event_time", "event_type", "queue_id", "packet_id"]);
    assert_eq!(rows.len(), 20);
    let times: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(times.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(rows[0][1], "arrival");
}

#[test]
fn simulation_summary_is_deterministic() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time");
        v
    };
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for d in [&a, &b] {
        let out = vnfperf(d.path(), &["--seed", "9", "simulate", path(&data("mixed.json")), "--packets", "50000", "--replications", "3"]);
        assert!(out.status.success());
    }
    let read = |d: &TempDir| strip(json(&d.path().join("simulate-summary.json")));
    assert_eq!(read(&a), read(&b));
    let csv = |d: &TempDir| fs::read(d.path().join("simulate-queues.csv")).unwrap();
    assert_eq!(csv(&a), csv(&b));

    // A different seed changes the result.
    let c = TempDir::new().unwrap();
    assert!(vnfperf(c.path(), &["--seed", "10", "simulate", path(&data("mixed.json")), "--packets", "50000", "--replications", "3"])
        .status
        .success());
    assert_ne!(read(&a), read(&c));
}

#[test]
fn thread_count_does_not_change_results() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = |t: &'static str| ["simulate", "", "--packets", "20000", "--replications", "4", "--threads", t];
    for (d, t) in [(&a, "1"), (&b, "4")] {
        let mut v = args(t);
        let f = data("mixed.json");
        v[1] = path(&f);
        assert!(vnfperf(d.path(), &v).status.success());
    }
    assert_eq!(
        fs::read(a.path().join("simulate-queues.csv")).unwrap(),
        fs::read(b.path().join("simulate-queues.csv")).unwrap()
    );
}

#[test]
fn compare_columns_follow_simulation_flag() {
    let dir = TempDir::new().unwrap();
    assert!(vnfperf(dir.path(), &["compare", path(&data("mixed.json"))]).status.success());
    let (header, rows) = read_csv(&dir.path().join("compare.csv"));
    assert_eq!(header, ["method", "T", "wall_time"]);
    assert_eq!(rows.len(), 2);

    assert!(vnfperf(dir.path(), &["compare", path(&data("mixed.json")), "--simulate", "--packets", "100000"])
        .status
        .success());
    let (header, rows) = read_csv(&dir.path().join("compare.csv"));
    assert_eq!(header, ["method", "T", "epsilon", "wall_time"]);
    assert_eq!(rows[2][0], "simulation");
    assert_eq!(rows[2][2], "");
    let eps: f64 = rows[0][2].parse().unwrap();
    assert!(eps < 0.1, "{eps}");
    let text = fs::read_to_string(dir.path().join("compare.txt")).unwrap();
    assert!(text.starts_with("method"));
}

#[test]
fn replications_narrow_the_interval() {
    let hw = |reps: &str| {
        let dir = TempDir::new().unwrap();
        let out = vnfperf(dir.path(), &["simulate", path(&data("mixed.json")), "--packets", "40000", "--replications", reps]);
        assert!(out.status.success());
        json(&dir.path().join("simulate-summary.json"))["mean_response_time"]["half_width"].as_f64().unwrap()
    };
    // Ten replications of the same length carry ten times the data of one;
    // the interval shrinks by roughly 1/sqrt(10), though batch dependence
    // makes the single-run interval itself noisy.
    let ratio = hw("10") / hw("1");
    assert!(ratio > 0.1 && ratio < 0.7, "{ratio}");
}

#[test]
fn unreachable_sweep_keeps_feasible_rows() {
    let dir = TempDir::new().unwrap();
    let out = vnfperf(dir.path(), &["sweep", path(&scenario()), "--users", "1e5:1e6:1e5", "--max-workers", "2"]);
    assert_eq!(out.status.code(), Some(4));
    let (header, rows) = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(header, ["N_U", "K_W", "T", "rho_FE", "rho_W_max", "rho_DB", "scaled_flag"]);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r[1].parse::<u64>().unwrap() <= 2));
    assert!(dir.path().join("sweep-manifest.json").exists());
}

#[test]
fn sweep_cross_check() {
    let dir = TempDir::new().unwrap();
    let out = vnfperf(
        dir.path(),
        &["sweep", path(&scenario()), "--users", "1e5,2e5", "--simulate-at", "1e5", "--packets", "200000"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("sweep-crosscheck.csv"));
    assert_eq!(header, ["N_U", "K_W", "T_theo", "T_sim", "T_sim_hw", "epsilon"]);
    assert_eq!(rows.len(), 1);
    let eps: f64 = rows[0][5].parse().unwrap();
    assert!(eps < 0.2);
    let bad = vnfperf(dir.path(), &["sweep", path(&scenario()), "--users", "1e5", "--simulate-at", "3e5"]);
    assert_eq!(bad.status.code(), Some(1));
}
