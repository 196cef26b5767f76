//! Contract tests for the command-line interface: exit codes, emitted
//! documents, and byte-level determinism of harness runs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

fn fixture_str(rel: &str) -> String {
    fixture(rel).to_string_lossy().into_owned()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sarguard"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn sarguard")
}

fn stdout_json(output: &Output) -> Value {
    let text = String::from_utf8_lossy(&output.stdout);
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {text}"))
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

fn stderr_text(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn help_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["--help"]);
    assert_eq!(code(&out), 0);
    let usage = String::from_utf8_lossy(&out.stdout);
    for sub in ["terrain", "poa", "guard", "harness", "export"] {
        assert!(usage.contains(sub), "help is missing `{sub}`");
    }
}

#[test]
fn terrain_build_prints_the_scene_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["terrain", "build", &fixture_str("terrain/stage3.json")]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr_text(&out));
    let summary = stdout_json(&out);
    assert_eq!(summary["rows"], 12);
    assert_eq!(summary["cols"], 16);
    let ids: Vec<&str> = summary["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    for id in ["Trail-10", "Trail-11", "Lake-5", "Low_Vegetation-42"] {
        assert!(ids.contains(&id), "missing cluster {id} in {ids:?}");
    }
}

#[test]
fn poa_compute_update_export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = fixture_str("plans/stage3_scenario.json");

    let out = run_in(
        dir.path(),
        &["poa", "compute", "--scenario", &scenario, "--et", "60", "--out", "poa.json"],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr_text(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("checksum"));
    let surface: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("poa.json")).unwrap())
            .unwrap();
    assert_eq!(surface["rows"], 12);
    assert_eq!(surface["p"].as_array().unwrap().len(), 192);
    assert!(surface["q"].get("Trail-10").is_some());

    // Folding the scenario's clue in moves mass, so the checksum changes.
    let out = run_in(
        dir.path(),
        &[
            "poa",
            "update",
            "--scenario",
            &scenario,
            "--et",
            "60",
            "--poa",
            "poa.json",
            "--out",
            "updated.json",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr_text(&out));
    let updated: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("updated.json")).unwrap())
            .unwrap();
    assert_ne!(surface["p"], updated["p"], "the update left the surface untouched");
    assert_eq!(updated["provenance"].as_array().unwrap().len(), 1);

    let out = run_in(
        dir.path(),
        &[
            "export",
            "heatmap",
            "--poa",
            "updated.json",
            "--terrain",
            &fixture_str("terrain/stage3.json"),
            "--out",
            "heat",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr_text(&out));
    let pgm = std::fs::read(dir.path().join("heat.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n16 12\n255\n"), "unexpected graymap header");
    let geojson: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("heat.geojson")).unwrap())
            .unwrap();
    assert_eq!(geojson["type"], "FeatureCollection");
}

#[test]
fn guard_evaluate_reports_one_verdict_per_action() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = fixture_str("plans/stage3_scenario.json");
    for extra in [None, Some("--no-update")] {
        let mut args = vec!["guard", "evaluate", "--plan", scenario.as_str()];
        if let Some(flag) = extra {
            args.push(flag);
        }
        let out = run_in(dir.path(), &args);
        assert_eq!(code(&out), 0, "stderr: {}", stderr_text(&out));
        let doc = stdout_json(&out);
        let outcome = &doc["evaluation"]["outcome"];
        assert_eq!(outcome["status"], "evaluated");
        assert_eq!(outcome["updated"], extra.is_none());
        let verdicts = outcome["verdicts"].as_array().unwrap();
        let candidates: Vec<&str> =
            verdicts.iter().map(|v| v["candidate"].as_str().unwrap()).collect();
        assert_eq!(candidates, ["Trail-10", "Trail-11", "Lake-5"]);
        // Proposing a search of open water never survives the envelope.
        assert_eq!(verdicts[2]["decision"], "REJECT");
    }
}

#[test]
fn missing_input_exits_one_and_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["guard", "evaluate", "--plan", "no_such_plan.json"]);
    assert_eq!(code(&out), 1);
    assert!(
        stderr_text(&out).contains("no_such_plan.json"),
        "stderr does not name the missing file: {}",
        stderr_text(&out)
    );
}

#[test]
fn unknown_flag_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = fixture_str("plans/stage3_scenario.json");
    let out =
        run_in(dir.path(), &["guard", "evaluate", "--plan", &scenario, "--frobnicate"]);
    assert_eq!(code(&out), 1);
    assert!(stderr_text(&out).contains("--frobnicate"));
}

#[test]
fn non_positive_elapsed_time_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = fixture_str("plans/stage3_scenario.json");
    let out = run_in(
        dir.path(),
        &["poa", "compute", "--scenario", &scenario, "--et", "0"],
    );
    assert_eq!(code(&out), 1);
    assert!(stderr_text(&out).contains("must be positive"));
}

#[test]
fn unresolvable_plan_action_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // Same scenario, but the plan names a subcluster the terrain does not
    // produce. Loading succeeds; evaluation is what fails.
    let mut doc: Value = serde_json::from_str(
        &std::fs::read_to_string(fixture("plans/stage3_scenario.json")).unwrap(),
    )
    .unwrap();
    doc["terrain"] = Value::String(fixture_str("terrain/stage3.json"));
    doc["cap"]["actions"] = serde_json::json!(["Trail-10", "Trail-99"]);
    let plan = dir.path().join("broken.json");
    std::fs::write(&plan, serde_json::to_string_pretty(&doc).unwrap()).unwrap();

    let out = run_in(dir.path(), &["guard", "evaluate", "--plan", plan.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr_text(&out));
    assert!(stderr_text(&out).contains("Trail-99"));
}

#[test]
fn harness_runs_are_byte_identical_and_match_the_golden_report() {
    let dir = tempfile::tempdir().unwrap();
    let suite = fixture_str("mini_suite");
    for out_dir in ["first", "second"] {
        let out = run_in(
            dir.path(),
            &["harness", "run", "--suite", &suite, "--seed", "0", "--out", out_dir],
        );
        assert_eq!(code(&out), 0, "stderr: {}", stderr_text(&out));
        let printed = String::from_utf8_lossy(&out.stdout).into_owned();
        assert!(printed.contains("Group-1 no_update"), "missing aggregates: {printed}");
    }

    let first = std::fs::read(dir.path().join("first/report.json")).unwrap();
    let second = std::fs::read(dir.path().join("second/report.json")).unwrap();
    assert_eq!(first, second, "same seed, different reports");

    let golden = std::fs::read(fixture("golden/mini_suite_report.json")).unwrap();
    assert_eq!(first, golden, "report drifted from the checked-in golden copy");

    // Heatmaps render for every evaluated cell and are deterministic too.
    let heatmap = "riverbend_v5_et60_with_update.pgm";
    let a = std::fs::read(dir.path().join("first").join(heatmap)).unwrap();
    let b = std::fs::read(dir.path().join("second").join(heatmap)).unwrap();
    assert_eq!(a, b);

    let pgm_count = std::fs::read_dir(dir.path().join("first"))
        .unwrap()
        .filter(|e| {
            e.as_ref().unwrap().path().extension().is_some_and(|ext| ext == "pgm")
        })
        .count();
    assert_eq!(pgm_count, 20, "2 scenarios x 5 elapsed times x 2 update modes");
}

#[test]
fn harness_mode_is_selectable() {
    let dir = tempfile::tempdir().unwrap();
    let suite = fixture_str("mini_suite");
    let out = run_in(
        dir.path(),
        &[
            "harness",
            "run",
            "--suite",
            &suite,
            "--mode",
            "no_update",
            "--ets",
            "30,60",
            "--out",
            "out",
            "--no-heatmaps",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr_text(&out));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["mode"], "no_update");
    assert_eq!(report["et_minutes"], serde_json::json!([30.0, 60.0]));
    assert_eq!(report["cells"].as_array().unwrap().len(), 4);

    let bad = run_in(dir.path(), &["harness", "run", "--suite", &suite, "--mode", "sideways"]);
    assert_eq!(code(&bad), 1);
}
