//! End-to-end checks of the `skewflow` binary and the job/report plumbing.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use skewflow_cli::job::{canonical_text, parse_job};
use skewflow_cli::report::{strip_timestamp, Report};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skewflow"))
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("skewflow-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_job(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn list_builtins_names_every_fixture() {
    let out = bin().arg("list-builtins").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "ex_ce",
        "ex_nues1",
        "ex_nueis1",
        "ex_nued",
        "ex_nuet",
        "diag_fixture",
        "direct_sum",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn check_axioms_exit_codes_follow_the_verdict() {
    let ok = bin()
        .args(["check-axioms", "--builtin", "ex_nued", "--triples", "20"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.contains("PASS"));

    let bad = bin()
        .args([
            "check-axioms",
            "--builtin",
            "ex_ce",
            "--variant",
            "paper",
            "--triples",
            "20",
        ])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    let text = String::from_utf8(bad.stdout).unwrap();
    assert!(text.contains("FAIL"));
}

#[test]
fn strict_mode_rejects_unknown_keys_and_lenient_accepts() {
    let dir = tempdir("strict");
    let job = write_job(
        &dir,
        "job.skew",
        "system {\n  builtin ex_nues1\n}\nanalysis es {\n  mu 1\n  typo 3\n}\n",
    );
    let out = bin().arg("analyze").arg(&job).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("typo"), "{err}");
    assert!(err.contains("line"), "{err}");

    let out = bin().arg("analyze").arg(&job).arg("--lenient").output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn job_echo_round_trip_is_idempotent() {
    let text = "\
seed 3
system {
  inline {
    dim 1
    step 0.5
    step 0.5
  }
}
analysis es {
  mu 0.3
}
analysis instability {
  rate 0.25
}
";
    let job = parse_job(text, true).unwrap();
    let echo = canonical_text(&job);
    let reparsed = parse_job(&echo, true).unwrap();
    assert_eq!(job, reparsed);
    assert_eq!(canonical_text(&reparsed), echo);
}

#[test]
fn analyze_report_carries_the_estimate_and_expected_constants() {
    let dir = tempdir("estimate");
    let job = write_job(
        &dir,
        "job.skew",
        "\
seed 5
system {
  builtin ex_nues1
}
horizon {
  n_max 50
  states 2
  vectors 2
}
analysis estimate {
  direction stable
  lo 0.2
  hi 6
  tol 0.0001
}
",
    );
    let out = bin().arg("analyze").arg(&job).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let report = Report::parse(&text).unwrap();
    let est = &report.analyses[0];
    let (_, value) = est.kvs.iter().find(|(k, _)| k == "exponent").unwrap();
    let rho: f64 = value.parse().unwrap();
    assert!((rho - 3.0).abs() <= 1e-3, "rho = {rho}");
    // provenance echoes the fixture's expected classification
    assert!(report.job_echo.contains("expected:"));
}

#[test]
fn dichotomy_report_echoes_the_worked_constants() {
    let dir = tempdir("dich");
    let job = write_job(
        &dir,
        "job.skew",
        "\
system {
  builtin ex_nued
}
horizon {
  n_max 50
  states 2
  vectors 4
}
analysis dichotomy {
  nu1 -1
  nu2 1
  projectors coordinate 1 1
}
",
    );
    let out = bin().arg("analyze").arg(&job).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let report = Report::parse(&text).unwrap();
    let block = &report.analyses[0];
    let (_, verdict) = block.kvs.iter().find(|(k, _)| k == "verdict").unwrap();
    assert_eq!(verdict, "holds");
    assert!(report.job_echo.contains("nu = 1"));
}

#[test]
fn inline_two_step_system_analyzes() {
    let dir = tempdir("inline");
    let job = write_job(
        &dir,
        "job.skew",
        "\
system {
  inline {
    dim 1
    step 0.5
    step 0.5
  }
}
horizon {
  n_max 2
  states 1
  vectors 1
}
analysis es {
  mu 0.2
}
",
    );
    let out = bin().arg("analyze").arg(&job).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = Report::parse(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let table = &report.analyses[0].tables[0];
    // Phi(2,0) = 0.25, so the mu = 0.2 requirement is e^{0.4} * 0.25 < 1
    let a0: f64 = table.rows[0][1].parse().unwrap();
    assert_eq!(a0, 1.0);
}

#[test]
fn csv_emission_is_deterministic_and_reproducible_from_the_report() {
    let dir = tempdir("determinism");
    let job_body = "\
seed 11
system {
  builtin ex_nues1
}
horizon {
  n_max 30
  states 2
  vectors 3
}
analysis axioms {
  triples 15
}
analysis es {
  mu 3
}
analysis datko {
  rho 1
  gauge identity
}
";
    let job = write_job(&dir, "job.skew", job_body);
    let out_a = dir.join("a");
    // identical invocations: run, snapshot, wipe, run again into the same path
    let run = |out: &Path| {
        let st = bin()
            .arg("analyze")
            .arg(&job)
            .arg("--out")
            .arg(out)
            .output()
            .unwrap();
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    };
    run(&out_a);
    let ra = fs::read_to_string(out_a.join("report.txt")).unwrap();
    let mut names: Vec<String> = fs::read_dir(out_a.join("csv"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    let snapshot: Vec<Vec<u8>> = names
        .iter()
        .map(|n| fs::read(out_a.join("csv").join(n)).unwrap())
        .collect();
    let keep = dir.join("keep");
    fs::rename(&out_a, &keep).unwrap();
    run(&out_a);
    // identical reports modulo the timestamp line
    let rb = fs::read_to_string(out_a.join("report.txt")).unwrap();
    assert_eq!(strip_timestamp(&ra), strip_timestamp(&rb));
    // byte-identical CSVs
    for (name, old) in names.iter().zip(&snapshot) {
        let fresh = fs::read(out_a.join("csv").join(name)).unwrap();
        assert_eq!(&fresh, old, "CSV {name} differs between runs");
    }
    // es coefficients are exactly 1.0 at the sharp rate
    let es_csv = fs::read_to_string(out_a.join("csv").join("02_es_coefficients.csv")).unwrap();
    let mut lines = es_csv.lines();
    assert_eq!(lines.next().unwrap(), "n,coefficient,max_ratio,verdict");
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[1], "1.0000000000000000e0");
        assert_eq!(cols[3], "1");
    }
    // axiom residual column is tiny everywhere
    let ax_csv = fs::read_to_string(out_a.join("csv").join("01_axioms_residuals.csv")).unwrap();
    for line in ax_csv.lines().skip(1) {
        let res: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(res <= 1e-12);
    }
    // emit-csv from the saved report reproduces the same bytes
    let redo = dir.join("redo");
    let st = bin()
        .arg("emit-csv")
        .arg(out_a.join("report.txt"))
        .arg("--out")
        .arg(&redo)
        .output()
        .unwrap();
    assert!(st.status.success());
    for name in &names {
        let a = fs::read(out_a.join("csv").join(name)).unwrap();
        let b = fs::read(redo.join(name)).unwrap();
        assert_eq!(a, b, "emit-csv changed {name}");
    }
}

#[test]
fn estimate_verb_reports_no_positive_exponent_for_flat_systems() {
    let out = bin()
        .args([
            "estimate",
            "--builtin",
            "diag_fixture",
            "--direction",
            "stable",
            "--lo",
            "0.05",
            "--hi",
            "2",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("no positive stable exponent"), "{text}");
}

mod parser_robustness {
    use proptest::prelude::*;
    use skewflow_cli::job::parse_job;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        // arbitrary junk must never panic or hang the parser
        #[test]
        fn arbitrary_text_never_panics(text in "[ -~\n{}]{0,400}") {
            let _ = parse_job(&text, true);
            let _ = parse_job(&text, false);
        }

        // numeric fields reject non-finite input instead of storing it
        #[test]
        fn tolerances_stay_finite(v in prop_oneof![Just("nan"), Just("inf"), Just("-inf"), Just("1e999")]) {
            let text = format!(
                "tolerance {v}\nsystem {{\n  builtin ex_nues1\n}}\nanalysis es {{\n  mu 1\n}}\n"
            );
            match parse_job(&text, true) {
                Ok(job) => prop_assert!(job.tolerance.is_finite() && job.tolerance > 0.0),
                Err(_) => {}
            }
        }
    }
}
