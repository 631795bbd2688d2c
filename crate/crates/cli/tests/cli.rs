//! Contract tests for the config format, the validator's error
//! accumulation, the runner, and the binary's exit codes and determinism.

use std::fs;
use std::path::Path;
use std::process::Command;

use polylab::config::{validate_config, ExperimentConfig, MeasureInput, Scenario};
use polylab::run::{run_experiment, RunError, RunOptions};
use polylab::RunOutcome;

fn validate_here(text: &str) -> Result<ExperimentConfig, Vec<String>> {
    validate_config(text, Path::new("."))
}

fn run_text(text: &str) -> RunOutcome {
    let cfg = validate_here(text).expect("config should validate");
    run_experiment(&cfg, &RunOptions::default()).expect("scenario should run")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polylab"))
}

const MINIMAL_MEASURE: &str = "\
[experiment]
kind = measure
label = quad

[input]
family = x^2

[sets]
n_values = 4,8
";

#[test]
fn minimal_measure_config_parses() {
    let cfg = validate_here(MINIMAL_MEASURE).expect("minimal measure config is valid");
    assert_eq!(cfg.kind, "measure");
    assert_eq!(cfg.label, "quad");
    match &cfg.scenario {
        Scenario::Measure {
            input: MeasureInput::Family { family, .. },
            n_values,
            start,
        } => {
            assert_eq!(family.len(), 1);
            assert_eq!(n_values, &[4, 8]);
            assert_eq!(*start, 1);
        }
        _ => panic!("expected a measure scenario with a family input"),
    }
}

#[test]
fn eps_zero_is_rejected_with_the_documented_message() {
    let text = "\
[experiment]
kind = classify

[input]
family = x^2

[params]
eps = 0
";
    let errors = validate_here(text).err().expect("eps = 0 must be rejected");
    assert!(
        errors.iter().any(|e| e.contains("eps must be in (0,1)")),
        "missing the documented eps message, got: {errors:?}"
    );
}

#[test]
fn multiple_errors_are_reported_together() {
    // Three independent problems: bad eps, missing family input, and an
    // unknown key. All must surface in one validation pass.
    let text = "\
[experiment]
kind = classify

[params]
eps = 0
bogus = 1
";
    let errors = validate_here(text).err().expect("config is invalid");
    assert!(errors.iter().any(|e| e.contains("eps must be in (0,1)")));
    assert!(errors.iter().any(|e| e.contains("input.family")));
    assert!(errors.iter().any(|e| e.contains("params.bogus")));
    assert!(errors.len() >= 3, "expected all errors at once: {errors:?}");
}

#[test]
fn missing_referenced_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let text = "\
[experiment]
kind = decompose

[input]
poly_file = nope.txt
";
    let errors = validate_config(text, dir.path()).err().expect("must fail");
    assert!(
        errors.iter().any(|e| e.contains("nope.txt")),
        "the offending path must be named: {errors:?}"
    );
}

#[test]
fn missing_referenced_file_exits_2_from_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("exp.cfg");
    fs::write(
        &cfg_path,
        "[experiment]\nkind = decompose\n\n[input]\npoly_file = nope.txt\n",
    )
    .unwrap();
    let out = bin()
        .args(["decompose", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("nope.txt"), "stderr: {stderr}");
}

#[test]
fn missing_config_file_exits_2_naming_the_path() {
    let out = bin()
        .args(["tower", "--config", "/definitely/not/here.cfg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("/definitely/not/here.cfg"),
        "stderr: {stderr}"
    );
}

#[test]
fn duplicate_and_malformed_lines_are_rejected_with_line_numbers() {
    let text = "\
[experiment]
kind = tower
kind = tower
what is this
";
    let errors = validate_here(text).err().expect("must fail");
    assert!(errors
        .iter()
        .any(|e| e.contains("line 3") && e.contains("duplicate")));
    assert!(errors.iter().any(|e| e.contains("line 4")));
}

#[test]
fn unknown_scenario_kind_is_rejected() {
    let errors = validate_here("[experiment]\nkind = frobnicate\n")
        .err()
        .unwrap();
    assert!(errors
        .iter()
        .any(|e| e.contains("unknown scenario kind `frobnicate`")));
}

#[test]
fn bounds_example_reports_eta_unbalanced_half() {
    let outcome = run_text(
        "\
[experiment]
kind = bounds
label = demo

[params]
eps = 1
m = 1
c_prime = 1
",
    );
    let row = outcome
        .report
        .rows()
        .iter()
        .find(|r| r.label.ends_with("/eta_unbalanced"))
        .expect("eta_unbalanced row present");
    assert_eq!(row.slope, Some(0.5));
    assert!(outcome
        .report
        .to_csv()
        .contains("eta_unbalanced,,,,,,,0.5,"));
}

#[test]
fn tower_example_reports_image_32_at_n_16() {
    let outcome = run_text("[experiment]\nkind = tower\n\n[tower]\nn_values = 16\n");
    let rows = outcome.report.rows();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].n, Some(16));
    assert_eq!(rows[0].image, Some(32));
}

#[test]
fn rows_come_out_sorted_by_label_then_n() {
    let outcome = run_text(
        "\
[experiment]
kind = measure
label = sortcheck

[input]
family = x^2

[sets]
n_values = 40,10,20
",
    );
    let ns: Vec<Option<u128>> = outcome.report.rows().iter().map(|r| r.n).collect();
    assert_eq!(ns, vec![Some(10), Some(20), Some(40)]);
}

#[test]
fn every_numeric_cell_parses_back_exactly() {
    let outcome = run_text(
        "\
[experiment]
kind = measure
label = roundtrip

[input]
poly = x^2 + x*y0 + y0^2

[sets]
n_values = 5,10,20
",
    );
    let csv = outcome.report.to_csv();
    let mut lines = csv.lines();
    let header_cols = lines.next().unwrap().split(',').count();
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), header_cols);
        // columns 2..6 are integers, 6..10 floats; all must parse exactly.
        for cell in &cells[2..6] {
            if !cell.is_empty() {
                cell.parse::<u128>().expect("integer cell parses");
            }
        }
        for cell in &cells[6..10] {
            if !cell.is_empty() {
                let v: f64 = cell.parse().expect("float cell parses");
                assert_eq!(format!("{v}"), **cell, "float formatting must round-trip");
            }
        }
    }
}

#[test]
fn csv_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("m.cfg");
    fs::write(
        &cfg_path,
        "[experiment]\nkind = measure\nlabel = det\n\n[input]\npoly = x^2 + x*y0 + y0^2\n\n\
         [sets]\nn_values = 10,20,40\n",
    )
    .unwrap();
    let mut outputs = Vec::new();
    for (name, threads) in [("a.csv", "1"), ("b.csv", "2"), ("c.csv", "1")] {
        let out_path = dir.path().join(name);
        let status = bin()
            .args(["measure", "--config"])
            .arg(&cfg_path)
            .args(["--threads", threads, "--out"])
            .arg(&out_path)
            .output()
            .unwrap();
        assert_eq!(status.status.code(), Some(0));
        outputs.push(fs::read(&out_path).unwrap());
    }
    assert_eq!(
        outputs[0], outputs[1],
        "1 vs 2 threads must agree byte-for-byte"
    );
    assert_eq!(
        outputs[0], outputs[2],
        "repeat runs must agree byte-for-byte"
    );
}

#[test]
fn dry_run_validates_prints_the_plan_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("t.cfg");
    fs::write(
        &cfg_path,
        "[experiment]\nkind = tower\n\n[tower]\nn_values = 1..=8\n",
    )
    .unwrap();
    let out_path = dir.path().join("never.csv");
    let out = bin()
        .args(["tower", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out_path)
        .arg("--dry-run")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("plan:"), "stdout: {stdout}");
    assert!(!out_path.exists(), "dry run must not write the CSV");
}

#[test]
fn span_budget_overrun_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("s.cfg");
    fs::write(
        &cfg_path,
        "[experiment]\nkind = span\n\n[span]\nbig_n = 65536\nk_values = 3\nbudget = 10\n",
    )
    .unwrap();
    let out = bin()
        .args(["span", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn budget_error_surfaces_as_runerror_budget() {
    let cfg = validate_here(
        "[experiment]\nkind = span\n\n[span]\nbig_n = 65536\nk_values = 3\nbudget = 10\n",
    )
    .unwrap();
    match run_experiment(&cfg, &RunOptions::default()) {
        Err(RunError::Budget(msg)) => assert!(msg.contains("budget")),
        Err(other) => panic!("expected a budget error, got {other:?}"),
        Ok(_) => panic!("expected a budget error, got a successful run"),
    }
}

#[test]
fn subcommand_must_match_config_kind() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("t.cfg");
    fs::write(
        &cfg_path,
        "[experiment]\nkind = tower\n\n[tower]\nn_values = 2\n",
    )
    .unwrap();
    let out = bin()
        .args(["span", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("tower") && stderr.contains("span"),
        "stderr: {stderr}"
    );
}

#[test]
fn seed_is_recorded_and_cli_overrides_config() {
    let text = "\
[experiment]
kind = bounds

[params]
seed = 9
";
    let cfg = validate_here(text).unwrap();
    let from_config = run_experiment(&cfg, &RunOptions::default()).unwrap();
    assert!(from_config.summary.iter().any(|l| l.starts_with("seed: 9")));
    let overridden = run_experiment(&cfg, &RunOptions { seed: Some(7) }).unwrap();
    assert!(overridden.summary.iter().any(|l| l.starts_with("seed: 7")));
}

#[test]
fn summaries_echo_the_constants_in_force() {
    let outcome = run_text("[experiment]\nkind = bounds\n\n[params]\nc = 0.5\nc_prime = 0.25\n");
    assert!(outcome
        .summary
        .iter()
        .any(|l| l.contains("c = 0.5") && l.contains("c_prime = 0.25") && l.contains("xi")));
}

#[test]
fn sets_load_from_referenced_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.txt"), "0\n1\n2\n3\n").unwrap();
    let text = "\
[experiment]
kind = incidence

[surface]
mode = graph
poly = x + d

[sets]
a = file:a.txt
d = 0,1
b = 0..=4
";
    let cfg = validate_config(text, dir.path()).expect("file-backed set validates");
    match &cfg.scenario {
        Scenario::Incidence { a, d, b, .. } => {
            assert_eq!((a.len(), d.len(), b.len()), (4, 2, 5));
        }
        _ => panic!("expected incidence scenario"),
    }
    let outcome = run_experiment(&cfg, &RunOptions::default()).unwrap();
    // pairs (x, delta) in {0..3} x {0,1} with x + delta in {0..4}: all 8.
    assert_eq!(outcome.report.rows()[0].incidence, Some(8));
}

#[test]
fn csv_goes_to_stdout_without_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("t.cfg");
    fs::write(
        &cfg_path,
        "[experiment]\nkind = tower\n\n[tower]\nn_values = 16\n",
    )
    .unwrap();
    let out = bin()
        .args(["tower", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("scenario,label,"), "stdout: {stdout}");
    assert!(stdout.contains("tower,tower,16,16,32"), "stdout: {stdout}");
}

#[test]
fn trailing_hash_comments_are_stripped_but_semicolons_are_kept() {
    let cfg = validate_here(
        "[experiment]\nkind = classify # scenario\n\n[input]\nfamily = x^2; x^3 # two members\n\n\
         [params]\neps = 0.5 # half\n",
    )
    .expect("inline comments should be ignored");
    match cfg.scenario {
        Scenario::Classify { eps, family, .. } => {
            assert_eq!(eps, 0.5);
            assert_eq!(
                family.len(),
                2,
                "`;` inside the value must still separate members"
            );
        }
        _ => panic!("expected a classify scenario"),
    }
}

#[test]
fn every_shipped_config_validates_against_its_filename() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).expect("configs/ directory exists") {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("ini") {
            continue;
        }
        seen += 1;
        let text = fs::read_to_string(&path).unwrap();
        let cfg = validate_config(&text, &dir)
            .unwrap_or_else(|errs| panic!("{} does not validate: {errs:?}", path.display()));
        let stem = path.file_stem().unwrap().to_str().unwrap();
        assert!(
            stem.starts_with(cfg.kind),
            "{} declares kind `{}`",
            path.display(),
            cfg.kind
        );
    }
    assert!(
        seen >= 10,
        "expected a worked config per scenario, found {seen}"
    );
}
