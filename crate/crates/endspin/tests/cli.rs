//! End-to-end checks of the installed binary: exit codes, file outputs, and
//! the sidecar reproduction contract.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn endspin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endspin"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should launch")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no exit code")
}

#[test]
fn help_exits_zero_and_lists_every_command() {
    let dir = tempfile::tempdir().unwrap();
    let output = endspin(&["--help"], dir.path());
    assert_eq!(exit_code(&output), 0);
    let text = String::from_utf8_lossy(&output.stdout);
    for command in [
        "time-sweep",
        "alpha-map",
        "fwhm",
        "scaling",
        "disorder-flip",
        "disorder-coupling",
        "oracle-check",
        "walk",
    ] {
        assert!(text.contains(command), "help missing {command}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(exit_code(&endspin(&["--no-such-flag"], dir.path())), 2);
    assert_eq!(exit_code(&endspin(&["frobnicate"], dir.path())), 2);
    // Structurally fine, semantically incomplete.
    assert_eq!(exit_code(&endspin(&["walk"], dir.path())), 2);
}

#[test]
fn config_errors_exit_two_with_a_key_path() {
    let dir = tempfile::tempdir().unwrap();
    let output = endspin(
        &[
            "time-sweep",
            "--n-sites",
            "9",
            "--state",
            "bell-pairs",
            "--output",
            "x.csv",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&output), 2);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("chain.n_sites"), "stderr: {stderr}");
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn walk_run_writes_a_normalized_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let output = endspin(
        &[
            "walk", "--n-sites", "13", "--site", "7", "--time", "3.25", "--output", "walk.csv",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&output), 0, "stderr: {}", String::from_utf8_lossy(&output.stderr));

    let csv = fs::read_to_string(dir.path().join("walk.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("site,probability"));
    let mut total = 0.0;
    let mut count = 0;
    for (i, line) in lines.enumerate() {
        let (site, prob) = line.split_once(',').unwrap();
        assert_eq!(site.parse::<usize>().unwrap(), i + 1);
        total += prob.parse::<f64>().unwrap();
        count += 1;
    }
    assert_eq!(count, 13);
    assert!((total - 1.0).abs() < 1e-10, "total {total}");
}

#[test]
fn sidecar_reproduces_the_run_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let output = endspin(
        &[
            "disorder-coupling",
            "--n-sites",
            "6",
            "--state",
            "bell-pairs",
            "--delta",
            "0.15",
            "--realizations",
            "8",
            "--t-stop",
            "3",
            "--t-count",
            "13",
            "--output",
            "first.csv",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&output), 0, "stderr: {}", String::from_utf8_lossy(&output.stderr));

    // No seed was given; the run must have drawn and recorded one.
    let sidecar = fs::read_to_string(dir.path().join("first.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&sidecar).unwrap();
    assert!(doc["seed"].is_u64(), "sidecar must record the entropy seed");
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["realizations"], 8);
    assert!(doc["meta"]["version"].is_string());

    // Re-feeding the sidecar, redirected to a second file, must reproduce
    // the data exactly.
    let rerun = endspin(
        &["--config", "first.json", "--output", "second.csv"],
        dir.path(),
    );
    assert_eq!(exit_code(&rerun), 0, "stderr: {}", String::from_utf8_lossy(&rerun.stderr));
    let first = fs::read(dir.path().join("first.csv")).unwrap();
    let second = fs::read(dir.path().join("second.csv")).unwrap();
    assert_eq!(first, second, "sidecar re-run must be bit-identical");
}

#[test]
fn time_sweep_csv_is_internally_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let output = endspin(
        &[
            "time-sweep",
            "--n-sites",
            "8",
            "--state",
            "canted",
            "--alpha",
            "3.141592653589793",
            "--t-stop",
            "4",
            "--t-count",
            "21",
            "--threads",
            "2",
            "--output",
            "sweep.csv",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&output), 0, "stderr: {}", String::from_utf8_lossy(&output.stderr));

    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("time,concurrence,fef,fidelity,distillable"));
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5);
        let concurrence: f64 = fields[1].parse().unwrap();
        let fef: f64 = fields[2].parse().unwrap();
        let fidelity: f64 = fields[3].parse().unwrap();
        // Fidelity column must be exactly the mapped fef at full precision.
        assert_eq!(fidelity, (2.0 * fef + 1.0) / 3.0, "row {line}");
        assert!((0.0..=1.0000001).contains(&concurrence));
        assert!(fields[4] == "0" || fields[4] == "1");
        assert_eq!(fields[4] == "1", fef > 0.5, "row {line}");
        rows += 1;
    }
    assert_eq!(rows, 21);
}

#[test]
fn oracle_check_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let output = endspin(&["oracle-check"], dir.path());
    assert_eq!(exit_code(&output), 0, "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("max deviation"), "stdout: {text}");
    assert!(text.contains(": ok"), "stdout: {text}");

    // With an output path it also writes the per-case table.
    let output = endspin(&["oracle-check", "--output", "oracle.csv"], dir.path());
    assert_eq!(exit_code(&output), 0);
    let csv = fs::read_to_string(dir.path().join("oracle.csv")).unwrap();
    assert!(csv.starts_with("n_sites,state,time,deviation"));
    assert_eq!(csv.lines().count(), 28);
}

#[test]
fn config_file_drives_a_run_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.json"),
        r#"{"command": "time-sweep", "N": 6, "state": "neel",
            "t": [0, 3, 7], "output": "from_file.csv"}"#,
    )
    .unwrap();
    let output = endspin(
        &["--config", "run.json", "--t-count", "5", "--output", "tweaked.csv"],
        dir.path(),
    );
    assert_eq!(exit_code(&output), 0, "stderr: {}", String::from_utf8_lossy(&output.stderr));
    assert!(!dir.path().join("from_file.csv").exists());
    let csv = fs::read_to_string(dir.path().join("tweaked.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6, "header plus five overridden grid points");
}
