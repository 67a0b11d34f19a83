//! End-to-end runs of the `misrep` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const REFERENCE_PROFILE: &str =
    "0.650\n0.580\n0.490\n0.485\n0.480\n0.470\n0.420\n0.400\n0.390\n0.380\n0.330\n0.325\n";

fn misrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_misrep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn write_profile(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("write profile");
    path
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../misrep/tests/fixtures/empirics")
}

#[test]
fn solve_reports_the_optimum_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write_profile(dir.path(), "p.txt", REFERENCE_PROFILE);
    let p = profile.to_str().unwrap();

    let out = misrep(&["solve", "--profile", p, "--weight", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "districts,aggregate,weight,optimal_low,optimal_high,awarded,dist,agg,phi,\
         cutoff,selected_support"
    );
    assert_eq!(
        lines.next().unwrap(),
        "12,27/5,1/1,5,5,1;2;3;4;5,503/100,2/5,543/100,12/25,1/25..inf"
    );

    let out = misrep(&["solve", "--profile", p, "--weight", "1", "--emit", "json"]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let row = &rows.as_array().unwrap()[0];
    assert_eq!(row["optimal_high"], 5);
    assert_eq!(row["phi"], "543/100");
    assert_eq!(row["aggregate"], "27/5");

    let out = misrep(&[
        "solve",
        "--profile",
        p,
        "--weight",
        "1",
        "--decimal-digits",
        "2",
    ]);
    assert!(stdout(&out).contains("5.43"));
}

#[test]
fn solve_at_infinite_weight_reports_lexicographic_phi() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write_profile(dir.path(), "p.txt", REFERENCE_PROFILE);
    let out = misrep(&[
        "solve",
        "--profile",
        profile.to_str().unwrap(),
        "--weight",
        "inf",
        "--emit",
        "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let row = &rows.as_array().unwrap()[0];
    assert_eq!(row["phi"]["agg"], "2/5");
    assert_eq!(row["phi"]["dist"], "503/100");
    assert_eq!(row["optimal_low"], 5);
}

#[test]
fn schedule_lists_every_weight_segment() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write_profile(dir.path(), "p.txt", REFERENCE_PROFILE);
    let out = misrep(&["schedule", "--profile", profile.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "w_lo,w_hi,seats,cutoff\n\
         0/1,1/50,2,1/2\n\
         1/50,3/100,3,49/100\n\
         3/100,1/25,4,97/200\n\
         1/25,inf,5,12/25\n"
    );
}

#[test]
fn frontier_flags_the_pareto_points_and_slopes() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write_profile(dir.path(), "p.txt", REFERENCE_PROFILE);
    let out = misrep(&["frontier", "--profile", profile.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 14); // header + one row per seat total
    assert!(text.contains("2,247/50,17/5,true,0/1..1/50"));
    assert!(text.contains("5,503/100,2/5,true,1/25..inf"));
    assert!(text.contains("0,27/5,27/5,false,empty"));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("-50/1@1/50 -100/3@3/100 -25/1@1/25"));

    let out = misrep(&[
        "frontier",
        "--profile",
        profile.to_str().unwrap(),
        "--full",
        "--emit",
        "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert!(rows.len() > 13); // dominated value pairs appear too
    assert!(rows.iter().all(|r| r["support"] == ""));
}

#[test]
fn axioms_certify_violations_and_honor_the_safe_endpoints() {
    let out = misrep(&[
        "axioms",
        "--axiom",
        "monotonicity",
        "--weight",
        "0",
        "--emit",
        "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["outcome"], "holds");

    let out = misrep(&[
        "axioms",
        "--axiom",
        "monotonicity",
        "--weight",
        "1",
        "--emit",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["outcome"], "violated");
    assert!(rows[0]["detail"]
        .as_str()
        .unwrap()
        .contains("loses its seat"));

    let out = misrep(&[
        "axioms",
        "--axiom",
        "redistricting",
        "--weight",
        "inf",
        "--districts",
        "5",
    ]);
    assert!(stdout(&out).contains("holds"));

    let out = misrep(&[
        "axioms",
        "--axiom",
        "redistricting",
        "--weight",
        "0.5",
        "--emit",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["outcome"], "violated");
    assert_eq!(rows[0]["detail"], "seats 2 -> 1");
}

#[test]
fn majorize_compares_files_and_searches_for_violations() {
    let dir = tempfile::tempdir().unwrap();
    let left = write_profile(dir.path(), "l.txt", "0.9\n0.5\n0.1\n");
    let right = write_profile(dir.path(), "r.txt", "0.7\n0.5\n0.3\n");
    let out = misrep(&[
        "majorize",
        "--left",
        left.to_str().unwrap(),
        "--right",
        right.to_str().unwrap(),
        "--seats",
        "2",
        "--weight",
        "1",
        "--emit",
        "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["outcome"], "majorizes");
    assert_eq!(rows[0]["prefix_gaps"], "1/5;1/5;0/1");
    assert_eq!(rows[0]["slack"], "2/5");

    // Swapped order fails the prefix test.
    let out = misrep(&[
        "majorize",
        "--left",
        right.to_str().unwrap(),
        "--right",
        left.to_str().unwrap(),
        "--emit",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["outcome"], "prefix_violation");

    let out = misrep(&[
        "majorize",
        "--search",
        "--rule-weight",
        "0.25",
        "--eval-weight",
        "3",
        "--attempts",
        "10000",
        "--seed",
        "7",
        "--emit",
        "json",
    ]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["outcome"], "violation");
    assert!(rows[0]["rule_evaluations"].as_u64().unwrap() <= 10_000);

    // Scoring with the rule's own weight can never disagree with it.
    let out = misrep(&[
        "majorize",
        "--search",
        "--rule-weight",
        "1",
        "--eval-weight",
        "1",
        "--attempts",
        "200",
        "--emit",
        "json",
    ]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["outcome"], "not_found");
}

#[test]
fn gerry_prints_the_cost_curve_and_marks_infeasible_weights() {
    let dir = tempfile::tempdir().unwrap();
    let profile = write_profile(dir.path(), "p.txt", "0.9\n0.8\n0.6\n0.1\n0.1\n0.1\n");
    let out = misrep(&[
        "gerry",
        "--profile",
        profile.to_str().unwrap(),
        "--k",
        "4",
        "--weights",
        "0,0.1,0.2,0.3,1.1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("0/1,feasible,2/5,"));
    assert!(text.contains("1/10,feasible,9/20,"));
    assert!(text.contains("1/5,feasible,1/2,"));
    assert!(text.contains("3/10,feasible,3/5,"));
    assert!(text.contains("11/10,infeasible,,"));
}

#[test]
fn empirics_writes_the_report_and_exclusion_log() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("report.csv");
    let fixtures = fixture_dir();
    let out = misrep(&[
        "empirics",
        "--input",
        fixtures.join("races").to_str().unwrap(),
        "--baseline",
        fixtures.join("baseline").to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("wrote 2 state-years"));
    let report = std::fs::read_to_string(&output).unwrap();
    let expected = std::fs::read_to_string(fixtures.join("expected_report.csv")).unwrap();
    assert_eq!(report, expected);
    let log = std::fs::read_to_string(dir.path().join("report.exclusions.json")).unwrap();
    let expected = std::fs::read_to_string(fixtures.join("expected_exclusions.json")).unwrap();
    assert_eq!(log, expected);
}

#[test]
fn failures_map_to_distinct_exit_codes() {
    // Unreadable input: general error.
    let out = misrep(&["solve", "--profile", "/nonexistent.txt", "--weight", "1"]);
    assert_eq!(out.status.code(), Some(3));

    // Malformed share: general error.
    let dir = tempfile::tempdir().unwrap();
    let bad = write_profile(dir.path(), "bad.txt", "1.5\n");
    let out = misrep(&["solve", "--profile", bad.to_str().unwrap(), "--weight", "1"]);
    assert_eq!(out.status.code(), Some(3));

    // Full enumeration past the guard: resource refusal.
    let big = "0.3\n".repeat(32);
    let big = write_profile(dir.path(), "big.txt", &big);
    let out = misrep(&["frontier", "--profile", big.to_str().unwrap(), "--full"]);
    assert_eq!(out.status.code(), Some(4));

    // Missing required argument: usage error.
    let out = misrep(&["solve", "--weight", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
