use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn xfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xfam"))
        .args(args)
        .env_remove("XFAM_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn measure_of_principal_family() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "principal_3_12.json", r#"{"n":3,"sets":[[1,2],[1,2,3]]}"#);
    let o = xfam(&["measure", "--family", s(&f), "--p", "1/3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1/9");
}

#[test]
fn cross_check_reports_false_without_failing() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "f1.json", r#"{"n":3,"sets":[[1,2]]}"#);
    let b = write(&dir, "f2.json", r#"{"n":3,"sets":[[2,3]]}"#);
    let o = xfam(&["check", "--cross", "--t", "2", s(&a), s(&b)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "false");
    let o = xfam(&["check", "--cross", "--t", "1", s(&a), s(&b)]);
    assert_eq!(stdout(&o).trim(), "true");
}

#[test]
fn sequence_families_check_with_threshold_vectors() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"m":3,"n":2,"seqs":[[1,2]]}"#);
    let b = write(&dir, "b.json", r#"{"m":3,"n":2,"seqs":[[1,3]]}"#);
    let o = xfam(&["check", "--cross", "--tvec", "1,0,0", s(&a), s(&b)]);
    assert_eq!(stdout(&o).trim(), "true");
    let o = xfam(&["check", "--cross", "--tvec", "(1,1,0)", s(&a), s(&b)]);
    assert_eq!(stdout(&o).trim(), "false");
}

#[test]
fn verify_prints_an_exact_report() {
    let o = xfam(&["verify", "tm3", "--n", "4", "--t", "2", "--p", "1/2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["theorem_id"], "TM3");
    assert_eq!(v["computed_extremum"], "5/16");
    assert_eq!(v["bound"], "5/16");
    assert_eq!(v["pass"], true);
    assert_eq!(v["mode"], "exhaustive");
}

#[test]
fn verify_writes_the_report_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r.json");
    let o = xfam(&["verify", "tm2", "--m", "3", "--n", "2", "--t", "1", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["computed_extremum"], "9");
    assert_eq!(v["bound"], "9");
}

#[test]
fn hypothesis_failures_exit_two() {
    let o = xfam(&["verify", "tm1", "--n", "3", "--t", "1", "--p1", "1/2", "--p2", "1/4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: "));
    let o = xfam(&["verify", "tm2", "--m", "2", "--n", "3", "--t", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = xfam(&["verify", "tm2", "--m", "3", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--t"));
}

#[test]
fn sampled_mode_requires_a_seed_and_reproduces() {
    let o = xfam(&["verify", "tm2", "--m", "3", "--n", "3", "--t", "1", "--mode", "sampled"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--seed"));

    let args = ["verify", "tm2", "--m", "3", "--n", "3", "--t", "1", "--mode", "sampled", "--trials", "50", "--seed", "11"];
    let first = xfam(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let again = xfam(&args);
    assert_eq!(stdout(&first), stdout(&again));
    let v: Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["trials"], 50);
}

#[test]
fn worker_count_does_not_change_reports() {
    let args = ["verify", "tm1", "--n", "4", "--t", "1", "--p1", "1/4", "--p2", "1/4"];
    let one = xfam(&args);
    let four = Command::new(env!("CARGO_BIN_EXE_xfam"))
        .args(args)
        .env("XFAM_WORKERS", "4")
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&four));
    let bad = Command::new(env!("CARGO_BIN_EXE_xfam"))
        .args(args)
        .env("XFAM_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn parse_errors_name_the_problem() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.json", r#"{"n":2,"sets":[[1,3]]}"#);
    let o = xfam(&["measure", "--family", s(&f), "--p", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("element 3 exceeds n=2"), "{}", stderr(&o));

    let f = write(&dir, "broken.json", "{\"n\":2,\n\"sets\":[[1,2]\n");
    let o = xfam(&["measure", "--family", s(&f), "--p", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));

    let o = xfam(&["measure", "--family", s(&dir.path().join("missing.json")), "--p", "1/2"]);
    assert_eq!(o.status.code(), Some(2));

    let f = write(&dir, "ok.json", r#"{"n":2,"sets":[[1]]}"#);
    let o = xfam(&["measure", "--family", s(&f), "--p", "3/2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dual_output_is_canonical_and_reparses() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "star.json", r#"{ "n": 2, "sets": [ [1] ] }"#);
    let o = xfam(&["dual", "--t", "1", s(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let once = stdout(&o);
    assert_eq!(once.trim(), r#"{"n":2,"sets":[[1],[1,2]]}"#);
    let g = write(&dir, "dual.json", &once);
    let twice = stdout(&xfam(&["dual", "--t", "1", s(&g)]));
    assert_eq!(once, twice);

    let f = write(&dir, "seq.json", r#"{"m":2,"n":1,"seqs":[[1]]}"#);
    let o = xfam(&["dual", "--t", "1", s(&f)]);
    assert_eq!(stdout(&o).trim(), r#"{"m":2,"n":1,"seqs":[[1]]}"#);
}

#[test]
fn shift_moves_sets_and_rejects_overlap() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.json", r#"{"n":3,"sets":[[1],[1,3]]}"#);
    let o = xfam(&["shift", "--a", "1", "--b", "2,3", s(&f)]);
    assert_eq!(stdout(&o).trim(), r#"{"n":3,"sets":[[1,3],[2,3]]}"#);
    let o = xfam(&["shift", "--a", "1", "--b", "1", s(&f)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn stabilize_writes_traces() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"n":3,"sets":[[2,3],[1,2,3]]}"#);
    let b = write(&dir, "b.json", r#"{"n":3,"sets":[[2,3]]}"#);
    let trace = dir.path().join("trace.json");
    let csv = dir.path().join("trace.csv");
    let o = xfam(&["stabilize", "--t", "2", s(&a), s(&b), "--trace", s(&trace), "--csv", s(&csv)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("[{\"n\":3"));
    let v: Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert!(v.is_object() || v.is_array());
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("level,A,B,potential"));
    assert!(text.lines().count() > 1);

    let c = write(&dir, "c.json", r#"{"n":3,"sets":[[1]]}"#);
    let o = xfam(&["stabilize", "--t", "2", s(&a), s(&c)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumerate_counts_and_lists() {
    let o = xfam(&["enumerate", "--n", "4", "--count"]);
    assert_eq!(stdout(&o).trim(), "168");
    let o = xfam(&["enumerate", "--n", "2"]);
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn desk_report_passes_and_is_well_formed() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("desk.csv");
    let json = dir.path().join("desk.json");
    let o = xfam(&["report", "--suite", "desk", "--out", s(&out), "--json", s(&json)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut r = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["theorem_id", "params", "mode", "extremum", "bound", "pass", "witness", "seed"]);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(stdout(&o).trim(), format!("{} reports, {} passed, 0 violations, 0 open-regime misses", rows.len(), rows.len()));
    assert!(rows.iter().all(|row| &row[5] == "true"));
    let v: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), rows.len());
}
