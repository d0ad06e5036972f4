//! End-to-end tests of the `distpair` binary: the exit-code contract,
//! report/CSV layout on disk, run-to-run determinism (including forced
//! single-threaded execution), and config-file/flag precedence.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_distpair"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn passing_run_exits_zero_and_writes_report() {
    let dir = tempdir().unwrap();
    let out = run(&["series-accuracy", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let text = stdout(&out);
    assert!(text.contains("check series_convergence"), "{text}");
    assert!(text.contains("check sign_decomposition"), "{text}");
    assert!(text.contains("verdict: PASS"), "{text}");
    assert!(text.contains("report: "), "{text}");

    let json = read(&dir.path().join("report.json"));
    assert!(json.contains("\"tool\": \"distpair\""));
    assert!(json.contains("\"verdict\": \"PASS\""));
    assert!(json.contains("\"name\": \"series_convergence\""));
    assert!(json.contains("\"inputs_digest\""));

    let csv = read(&dir.path().join("sign_decomposition.csv"));
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("label,"), "{header}");
    assert!(csv.lines().count() > 1, "CSV should carry data rows");
}

#[test]
fn forced_failure_exits_one() {
    let dir = tempdir().unwrap();
    let out = run(&["series-accuracy", "--tol", "1e-30", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("verdict: FAIL"));

    let json = read(&dir.path().join("report.json"));
    assert!(json.contains("\"verdict\": \"FAIL\""));
}

#[test]
fn usage_errors_exit_two() {
    // No experiment requested.
    let out = run(&[]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("usage: distpair"));

    // Unknown experiment name.
    let out = run(&["frobnicate"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown experiment"));

    // Value outside the validated range.
    let out = run(&["moments", "--eps", "2.0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("eps"));

    // Config file with an unknown key.
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "tol = 1e-6\nfrobnicate = 3\n").unwrap();
    let out = run(&["series-accuracy", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("frobnicate"));

    // Output directory that cannot be created (parent is a file).
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "not a directory").unwrap();
    let sub = blocker.join("sub");
    let out = run(&["series-accuracy", "--out", sub.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("cannot write report"));
}

#[test]
fn help_exits_zero_and_lists_experiments() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("identity-11-12"), "{text}");
    assert!(text.contains("eps-decomposition"), "{text}");
}

#[test]
fn config_file_drives_run_and_flags_override_it() {
    let dir = tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "# deliberately unreachable tolerance\n\
             experiments = series-accuracy\n\
             tol = 1e-30\n\
             out_dir = {}\n",
            out_a.display()
        ),
    )
    .unwrap();

    // The file alone selects the experiment, the tolerance and the out dir.
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 1, "stderr: {}", stderr(&out));
    assert!(read(&out_a.join("report.json")).contains("\"verdict\": \"FAIL\""));

    // Flags override the file: sane tolerance, different directory.
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--tol",
        "1e-6",
        "--out",
        out_b.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(read(&out_b.join("report.json")).contains("\"verdict\": \"PASS\""));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempdir().unwrap();
    let mk = |name: &str, single_thread: bool| {
        let out_dir = dir.path().join(name);
        let mut cmd = bin();
        cmd.args(["moments", "--out", out_dir.to_str().unwrap()]);
        if single_thread {
            cmd.env("DISTPAIR_THREADS", "1");
        }
        let out = cmd.output().expect("binary runs");
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
        out_dir
    };
    let a = mk("a", false);
    let b = mk("b", false);
    let c = mk("c", true);

    for file in ["report.json", "moment_table.csv", "csch2_mass.csv"] {
        let bytes_a = fs::read(a.join(file)).unwrap();
        let bytes_b = fs::read(b.join(file)).unwrap();
        let bytes_c = fs::read(c.join(file)).unwrap();
        assert_eq!(bytes_a, bytes_b, "{file} differs between identical runs");
        assert_eq!(bytes_a, bytes_c, "{file} differs under DISTPAIR_THREADS=1");
    }
}

/// Split one CSV line into fields, honoring the double-quote escaping used
/// for labels that contain commas.
fn split_csv(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    let mut chars = line.chars().peekable();
    while let Some(ch) = chars.next() {
        match ch {
            '"' if in_quotes && chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            '"' => in_quotes = !in_quotes,
            ',' if !in_quotes => fields.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    fields.push(cur);
    fields
}

#[test]
fn moment_table_csv_has_documented_layout() {
    let dir = tempdir().unwrap();
    let out = run(&["moments", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let csv = read(&dir.path().join("moment_table.csv"));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "label,numeric,closed_form,abs_err,error_estimate"
    );

    let mut rows = 0;
    for line in lines {
        let fields = split_csv(line);
        assert_eq!(fields.len(), 5, "row: {line}");
        assert!(fields[0].starts_with("n="), "label: {}", fields[0]);
        let nums: Vec<f64> = fields[1..]
            .iter()
            .map(|s| s.parse().unwrap_or_else(|e| panic!("parse '{s}': {e}")))
            .collect();
        let abs_err = nums[2];
        assert!(abs_err.is_finite() && abs_err < 1e-7, "row: {line}");
        rows += 1;
    }
    // Orders 0..=7 at two eps values.
    assert_eq!(rows, 16);
}
