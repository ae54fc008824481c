use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn permendo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permendo")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verdict_on_s5_is_local_at_5() {
    let out = permendo(&["verdict", "--scenario", path(&data("s5_s4.json"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["summary"], "indecomposable / local");
    assert_eq!(v["meta"]["seed"], 11);
    assert_eq!(v["meta"]["p"], 5);
    assert_eq!(v["cartan"], serde_json::json!([[2]]));
}

#[test]
fn other_primes_split_the_module() {
    let out = permendo(&["verdict", "--scenario", path(&data("s5_s4.json")), "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["summary"], "decomposable / not local");
}

#[test]
fn zero_probe_budget_exits_3_with_report() {
    let out = permendo(&["orbits", path(&data("s5_s4.json")), "--budget-probes", "0"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["status"], "budget_exhausted");
    assert_eq!(v["report"]["total"], 1);
    assert_eq!(v["report"]["index"], 5);
    assert_eq!(v["report"]["seed"], 11);
}

#[test]
fn input_errors_exit_4() {
    assert_eq!(permendo(&["orbits", "/nonexistent/scenario.json"]).status.code(), Some(4));
    assert_eq!(permendo(&["orbits"]).status.code(), Some(4));
    assert_eq!(permendo(&["verdict", "--scenario", path(&data("s5_s4.json")), "--sqrt", "5=1"]).status.code(), Some(4));
    assert_eq!(permendo(&["verdict", "--scenario", path(&data("s5_s4.json")), "--p", "6"]).status.code(), Some(4));
}

#[test]
fn stored_files_feed_later_stages() {
    let dir = scratch("stages");
    let out = permendo(&["intersect", path(&data("s5_s4.json")), "--output", path(&dir)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["partition"]["rank"], 2);
    let inter = dir.join("intersection_only.json");
    std::fs::write(&inter, serde_json::to_string(&v["intersection"]).unwrap()).unwrap();

    let ct = permendo(&["chartab", "--intersection", path(&inter), "--output", path(&dir)]);
    assert_eq!(ct.status.code(), Some(0), "{}", String::from_utf8_lossy(&ct.stderr));
    assert_eq!(json(&ct)["verification"]["orthogonality"], true);

    let vd = permendo(&["verdict", "--intersection", path(&inter), "--p", "5"]);
    assert_eq!(json(&vd)["summary"], "indecomposable / local");
    assert!(!json(&vd)["regular_cartan"].is_null());

    let dc = permendo(&["decomp", "--chartab", path(&dir.join("chartab.json")), "--p", "5"]);
    assert_eq!(dc.status.code(), Some(0), "{}", String::from_utf8_lossy(&dc.stderr));
    assert_eq!(json(&dc)["cartan"], serde_json::json!([[2]]));
}

#[test]
fn inconsistent_table_exits_2() {
    let dir = scratch("broken");
    let ct = permendo(&["chartab", "--scenario", path(&data("s5_s4.json"))]);
    let mut v = json(&ct);
    // the non-trivial row has multiplicity 4; 3 contradicts its value at A_1 mod 5
    v["rows"][1]["mult"] = 3.into();
    let f = dir.join("chartab.json");
    std::fs::write(&f, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(permendo(&["verdict", "--chartab", path(&f), "--p", "5"]).status.code(), Some(2));
}

#[test]
fn candidates_for_s5_at_5() {
    let out = permendo(&["candidates", path(&data("s5_table.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["candidates"], serde_json::json!([[1, 1]]));
    assert_eq!(v["box_size"], "2");
}

#[test]
fn runs_are_deterministic() {
    let a = permendo(&["intersect", path(&data("s5_s4.json")), "--seed", "5"]);
    let b = permendo(&["intersect", path(&data("s5_s4.json")), "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn fixtures_pass() {
    let out = permendo(&["fixtures"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 8);
}

#[test]
fn oracle_on_a_scenario() {
    let out = permendo(&["oracle", path(&data("s5_s4.json"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["instances"][0]["rank"], 2);
}

#[test]
fn table_rendering_is_plain_text() {
    let out = permendo(&["orbits", path(&data("s5_s4.json")), "--table"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("rank: 2"));
    assert!(serde_json::from_str::<Value>(&s).is_err());
}
