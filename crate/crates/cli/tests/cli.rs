use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spinroof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinroof"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn help_and_version_exit_zero() {
    let o = spinroof(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sample-diagram"));
    assert_eq!(spinroof(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec![],
        vec!["frobnicate"],
        vec!["sample-diagram", "--spin", "1", "--mode", "vvx", "--samples", "3"],
        vec!["sample-diagram", "--spin", "1", "--mode", "vvv", "--samples", "0"],
        vec!["decompose", "--r", "1,2", "--n", "0,0,1", "--kind", "min"],
        vec!["metrology", "--n", "4", "--axes", "plane", "--state", "unknown"],
    ] {
        let o = spinroof(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn diagram_csv_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let path = dir.path().join(name);
        let o = spinroof(&[
            "sample-diagram", "--spin", "2", "--mode", "vvq", "--samples", "500", "--seed", "4",
            "--threads", threads, "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "4");
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema: spinroof.diagram/1"));
    assert_eq!(lines.next(), Some("sample_id,purity,c1,c2,c3,mode"));
    assert_eq!(lines.count(), 500);
}

#[test]
fn diagram_jsonl_starts_with_schema() {
    let o = spinroof(&[
        "sample-diagram", "--spin", "1", "--mode", "qqq", "--samples", "5", "--format", "jsonl",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["schema"], "spinroof.diagram/1");
    assert_eq!(lines.len(), 6);
    for row in &lines[1..] {
        let sum = ["c1", "c2", "c3"].iter().map(|k| row[k].as_f64().unwrap()).sum::<f64>();
        assert!((sum - (row["purity"].as_f64().unwrap() - 0.5)).abs() < 1e-10);
        assert_eq!(row["mode"], "qqq");
    }
}

#[test]
fn diagram_to_unwritable_path_is_a_validation_failure() {
    let o = spinroof(&[
        "sample-diagram", "--spin", "1", "--mode", "vvv", "--samples", "2", "--out",
        "/nonexistent/dir/out.csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_and_repeats_byte_for_byte() {
    let args = ["verify", "--samples", "200", "--seed", "8"];
    let a = spinroof(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let b = spinroof(&args);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let summaries: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(summaries.iter().all(|s| s["failed"] == 0));
    // every requested spin is covered, keyed by 2s
    for two_s in [1, 2, 3] {
        assert!(summaries.iter().any(|s| s["spin"] == two_s), "missing 2s = {two_s}");
    }
}

fn write_state(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_rejects_corrupted_state() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_state(
        dir.path(),
        "bad.json",
        r#"{"dim": 2, "re": [[0.7, 0.0], [0.0, 0.7]], "im": [[0.0, 0.0], [0.0, 0.0]]}"#,
    );
    let o = spinroof(&["verify", "--samples", "3", "--state", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trace"));

    let missing = dir.path().join("missing.json");
    let o = spinroof(&["verify", "--state", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_accepts_a_supplied_state() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_state(
        dir.path(),
        "good.json",
        r#"{"dim": 3, "re": [[0.2, 0, 0], [0, 0.5, 0], [0, 0, 0.3]], "im": [[0, 0, 0], [0, 0, 0], [0, 0, 0]]}"#,
    );
    let o = spinroof(&["verify", "--samples", "5", "--state", &good]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn cs_for_one_half() {
    let o = spinroof(&["cs", "--smax", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# schema: spinroof.cs/1");
    assert_eq!(lines[1], "s,two_s,c,converged");
    let fields: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(fields[..2], ["0.5", "1"]);
    assert!((fields[2].parse::<f64>().unwrap() - 0.25).abs() < 1e-9);
    assert_eq!(fields[3], "true");
}

#[test]
fn cs_table_is_reproducible_and_reports_a_slope() {
    let args = ["cs", "--smax", "6", "--restarts", "16", "--seed", "2"];
    let a = spinroof(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, spinroof(&args).stdout);
    let text = stdout(&a);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("# loglog_slope: "), "{last}");
    assert!(last.ends_with("over s in [1.5, 3]"), "{last}");
}

#[test]
fn metrology_examples() {
    let o = spinroof(&["metrology", "--n", "4", "--axes", "plane", "--state", "twin-fock"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["quantum"]["achieved"].as_f64().unwrap() - 12.0).abs() < 1e-8);
    assert_eq!(v["quantum"]["limit"], 12.0);
    assert_eq!(v["classical"]["limit"], 4.0);
    assert_eq!(v["classical"]["witness"], true);

    let v = json(&spinroof(&["metrology", "--n", "3", "--axes", "sphere", "--state", "xyz-product"]));
    assert!((v["classical"]["achieved"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert_eq!(v["classical"]["witness"], false);

    let v = json(&spinroof(&["metrology", "--n", "4", "--axes", "sphere", "--state", "tetrahedron"]));
    assert!((v["quantum"]["achieved"].as_f64().unwrap() - 8.0).abs() < 1e-8);
    assert_eq!(v["quantum"]["limit"], 8.0);
}

#[test]
fn metrology_rejects_unsupported_and_mismatched_states() {
    let o = spinroof(&["metrology", "--n", "3", "--axes", "plane", "--state", "twin-fock"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let qubit = write_state(
        dir.path(),
        "q.json",
        r#"{"dim": 2, "re": [[0.5, 0], [0, 0.5]], "im": [[0, 0], [0, 0]]}"#,
    );
    let o = spinroof(&["metrology", "--n", "2", "--axes", "plane", "--state", &format!("@{qubit}")]);
    assert_eq!(o.status.code(), Some(2));
    let o = spinroof(&["metrology", "--n", "1", "--axes", "plane", "--state", &format!("@{qubit}")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["quantum"]["achieved"], 0.0);
}

#[test]
fn decompose_examples() {
    let v = json(&spinroof(&["decompose", "--r", "0,0,0", "--n", "0,0,1", "--kind", "min"]));
    assert_eq!(v["pure"], false);
    assert!((v["chord"]["p"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    let weights = v["decomposition"]["weights"].as_array().unwrap();
    assert_eq!(weights.len(), 2);

    let v = json(&spinroof(&["decompose", "--r", "0.5,0,0", "--n", "0,0,1", "--kind", "min"]));
    let r1: Vec<f64> = serde_json::from_value(v["chord"]["r1"].clone()).unwrap();
    let r2: Vec<f64> = serde_json::from_value(v["chord"]["r2"].clone()).unwrap();
    let h = 0.75f64.sqrt();
    assert!((r1[0] - 0.5).abs() < 1e-12 && r1[1].abs() < 1e-12);
    assert!((r1[2].abs() - h).abs() < 1e-12 && (r2[2] + r1[2]).abs() < 1e-12);
    assert!(v["gaps"]["qfi_gap"].as_f64().unwrap().abs() < 1e-12);

    let o = spinroof(&["decompose", "--r", "0,0,0", "--n", "0,0,1", "--kind", "eigen"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate"));

    let o = spinroof(&["decompose", "--r", "1,1,0", "--n", "0,0,1", "--kind", "max"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn decompose_eigen_reports_corollary_gaps() {
    let v = json(&spinroof(&["decompose", "--r", "0.3,0,0.4", "--n", "0,0,1", "--kind", "eigen"]));
    let gaps = &v["eigen_gaps"];
    let direct = gaps["qfi_gap_direct"].as_f64().unwrap();
    let closed = gaps["qfi_gap"].as_f64().unwrap();
    assert!((direct - closed).abs() < 1e-12);
    // (1 - |r|^2) |z × r̂|^2 with |r| = 1/2, r̂ = (0.6, 0, 0.8)
    assert!((closed - 0.75 * 0.36).abs() < 1e-12);
}
