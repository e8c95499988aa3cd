use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzi-qfi"))
        .args(args)
        .env_remove("MZI_QFI_CUTOFF_CEILING")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn analyze_noon() {
    let o = run(&["analyze", "--family", "noon", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    assert_eq!(r["schema"], "mzi-qfi/1");
    assert!((f(&r["qfi"]["f_variance"]) - 9.0).abs() < 1e-9);
    assert!((f(&r["qfi"]["crb"]) - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn analyze_coherent() {
    let o = run(&["analyze", "--family", "coherent", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    assert!((f(&r["qfi"]["f_variance"]) - 4.0).abs() < 1e-8);
    assert_eq!(r["qfi"]["scaling_class"]["sub_shot_noise"], false);
}

#[test]
fn analyze_tmsv_by_mean_number() {
    let o = run(&["analyze", "--family", "tmsv", "--nbar", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = json(&o);
    assert!(f(&r["qfi"]["f_variance"]).abs() < 1e-8);
    assert!(f(&r["entanglement"]["entropy"]) > 0.0);
}

#[test]
fn undefined_values_are_null_in_json_and_empty_in_csv() {
    let o = run(&["analyze", "--family", "coherent", "--alpha", "1.5"]);
    let r = json(&o);
    assert!(r["qfi"]["f_particle"].is_null());
    assert!(r["undefined"]["qfi.f_particle"].is_string());

    let o = run(&["analyze", "--family", "coherent", "--alpha", "1.5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("field,value\n"));
    assert!(text.lines().any(|l| l == "f_particle,"), "{text}");
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let args = ["analyze", "--family", "amplified-bell", "--nbar", "4"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let a = run(&["table1"]);
    let b = run(&["table1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["analyze", "--family", "noon", "--bogus", "1"],
        vec!["analyze", "--family", "noon"],
        vec!["analyze", "--family", "noon", "--xi", "0.5"],
        vec!["analyze", "--family", "noon", "--n", "2", "--nbar", "2"],
        vec!["table1", "--tol", "-1"],
        vec!["analyze", "--family", "noon", "--n", "3", "--route-tol", "0"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn ceiling_too_small_is_a_computation_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_mzi-qfi"))
        .args(["analyze", "--family", "coherent", "--alpha", "4"])
        .env("MZI_QFI_CUTOFF_CEILING", "8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error["), "{}", stderr(&o));
}

#[test]
fn table1_reports_mismatches_with_exit_three() {
    let o = run(&["table1", "--nbar", "4"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let r = json(&o);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    for row in rows {
        for cell in ["g2", "g2_ab", "qfi"] {
            let status = row[cell]["status"].as_str().unwrap();
            assert!(status == "MATCH" || status == "MISMATCH", "{row}");
            if status == "MISMATCH" {
                assert!(row[cell]["alternative"].is_object(), "{row}");
            }
        }
    }
}

#[test]
fn table1_csv_has_fixed_columns() {
    let o = run(&["table1", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("family,target_nbar,nbar,g2,"));
    assert_eq!(lines.count(), 10);
}

#[test]
fn route_disagreement_exits_two() {
    // A single coarse central difference cannot meet a 1e-12 route tolerance.
    let o = run(&[
        "analyze", "--family", "noon", "--n", "4", "--raw-fd", "--step", "1e-2", "--route-tol", "1e-12",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("route-disagreement"));
    // The report itself is still written.
    assert_eq!(json(&o)["qfi"]["routes_consistent"], false);
}

fn sweep_rows(args: &[&str]) -> Vec<Vec<String>> {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "target,nbar,qfi,g2,g2_ab,entropy,cov_sigma_z,note");
    lines.map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn sweep_coherent_over_mean_number() {
    let rows = sweep_rows(&["sweep", "--family", "coherent", "--nbar", "1,2,4,8"]);
    assert_eq!(rows.len(), 4);
    for (row, want) in rows.iter().zip([1.0, 2.0, 4.0, 8.0]) {
        let qfi: f64 = row[2].parse().unwrap();
        assert!((qfi - want).abs() < 1e-8, "{row:?}");
        // Particle fluctuations leave the covariance undefined.
        assert_eq!(row[6], "");
    }
}

#[test]
fn sweep_noon_over_photon_number() {
    let rows = sweep_rows(&["sweep", "--family", "noon", "--n", "2,3,4"]);
    for (row, n) in rows.iter().zip([2.0f64, 3.0, 4.0]) {
        let qfi: f64 = row[2].parse().unwrap();
        assert!((qfi - n * n).abs() < 1e-9, "{row:?}");
        let cov: f64 = row[6].parse().unwrap();
        assert!((cov - 1.0).abs() < 1e-9, "{row:?}");
    }
}

#[test]
fn sweep_twin_fock_over_photon_number() {
    let rows = sweep_rows(&["sweep", "--family", "twin-fock", "--n", "1,2,3"]);
    for (row, n) in rows.iter().zip([1.0f64, 2.0, 3.0]) {
        let nbar = 2.0 * n;
        let qfi: f64 = row[2].parse().unwrap();
        assert!((qfi - (nbar * nbar + 2.0 * nbar) / 2.0).abs() < 1e-9, "{row:?}");
    }
}

#[test]
fn sweep_help_documents_columns() {
    let o = run(&["sweep", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("target,nbar,qfi,g2,g2_ab,entropy,cov_sigma_z,note"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn state_files() {
    let dir = tempfile::tempdir().unwrap();

    let one = write(dir.path(), "one.json", r#"{"cutoff": 2, "amplitudes": [{"ja": 1, "jb": 0, "re": 1.0, "im": 0.0}]}"#);
    let o = run(&["analyze", "--state-file", &one]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!((f(&json(&o)["coherence"]["nbar_a"]) - 1.0).abs() < 1e-12);

    let short = write(dir.path(), "short.json", r#"{"cutoff": 2, "amplitudes": [{"ja": 1, "jb": 0, "re": 0.999999, "im": 0.0}]}"#);
    let o = run(&["analyze", "--state-file", &short]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    assert!((f(&json(&o)["coherence"]["nbar_a"]) - 1.0).abs() < 1e-12);

    let wide = write(dir.path(), "wide.json", r#"{"cutoff": 2, "amplitudes": [{"ja": 3, "jb": 0, "re": 1.0, "im": 0.0}]}"#);
    let o = run(&["analyze", "--state-file", &wide]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("exceeds cutoff"), "{}", stderr(&o));
}

#[test]
fn built_state_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("noon.json");
    let p = path.to_str().unwrap();
    let o = run(&["build", "--family", "noon", "--n", "4", "--output", p]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let from_file = json(&run(&["analyze", "--state-file", p]));
    let direct = json(&run(&["analyze", "--family", "noon", "--n", "4"]));
    assert_eq!(from_file["qfi"], direct["qfi"]);
    assert_eq!(from_file["coherence"], direct["coherence"]);
}

#[test]
fn output_files_are_complete_or_absent() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.to_str().unwrap();
    let o = run(&["analyze", "--family", "noon", "--n", "2", "--output", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["schema"], "mzi-qfi/1");

    // A failing run leaves neither the target nor temporary files behind.
    let bad = dir.path().join("bad.json");
    let o = run(&["analyze", "--family", "noon", "--n", "0", "--output", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!bad.exists());
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
}
