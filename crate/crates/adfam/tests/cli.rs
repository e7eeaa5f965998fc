use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use adfam::families::Family;
use adfam::graph;
use serde_json::Value;
use tempfile::TempDir;

fn adfam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adfam")).args(args).output().expect("binary runs")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn build(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let out = path(dir, name);
    let mut all = vec!["build"];
    all.extend_from_slice(args);
    all.extend(["--out", s(&out)]);
    let o = adfam(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(adfam(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(adfam(&["build", "steprans", "--depth", "x"]).status.code(), Some(1));
    assert_eq!(adfam(&["order", "decompose", "--method", "centered"]).status.code(), Some(1));
    assert_eq!(adfam(&["order", "--exact", "--heuristic", "antichains"]).status.code(), Some(1));
    assert_eq!(adfam(&["--help"]).status.code(), Some(0));
}

#[test]
fn build_writes_a_certified_family() {
    let dir = TempDir::new().unwrap();
    let fam = build(&dir, "s.json", &["steprans", "--depth", "6", "--count", "5", "--seed", "2"]);
    let f = Family::load(&fam).unwrap();
    assert_eq!(f.len(), 10);
    assert_eq!(f.metadata().kind(), "steprans");

    let grown = build(&dir, "g.json", &["grown", "--arity", "4", "--steps", "3"]);
    assert_eq!(Family::load(grown).unwrap().len(), 12);
    let cohen = path(&dir, "c.json");
    let o = adfam(&["build", "cohen", "--family", s(&fam), "--seed", "1", "--out", s(&cohen)]);
    assert!(matches!(o.status.code(), Some(0) | Some(2)));
}

#[test]
fn missing_metadata_exits_three() {
    let dir = TempDir::new().unwrap();
    let fam = build(&dir, "l.json", &["luzin", "--count", "12", "--base", "3"]);
    let o = adfam(&["order", "decompose", "--method", "centered", "--family", s(&fam)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let o = adfam(&["order", "decompose", "--method", "antichain", "--family", s(&fam), "--samples", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&o)["ok"], Value::Bool(true));
}

#[test]
fn corrupted_family_is_a_certification_failure() {
    let dir = TempDir::new().unwrap();
    let fam = build(&dir, "l.json", &["luzin", "--count", "6", "--base", "2"]);
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&fam).unwrap()).unwrap();
    doc["certificate"]["ceiling"] = Value::from(0);
    std::fs::write(&fam, doc.to_string()).unwrap();
    let o = adfam(&["order", "antichains", "--family", s(&fam)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn order_graph_exports() {
    let dir = TempDir::new().unwrap();
    let fam = build(&dir, "l.json", &["luzin", "--count", "5", "--base", "2"]);
    let dot = path(&dir, "g.dot");
    let o = adfam(&["order", "graph", "--family", s(&fam), "--members", "3", "--format", "dot", "--out", s(&dot)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("graph G {"));
    assert_eq!(text.matches("[label=").count(), 27);

    let json = path(&dir, "g.json");
    let o = adfam(&[
        "order", "graph", "--family", s(&fam), "--members", "2", "--convention", "join", "--out", s(&json),
    ]);
    assert!(o.status.success());
    let g = graph::import_graph_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(g.len(), 9);
    assert_eq!(g.convention, graph::Convention::Join);
}

#[test]
fn geometry_actions_write_csv() {
    let dir = TempDir::new().unwrap();
    let fam = build(&dir, "r.json", &["r-embeddable", "--count", "8", "--horizon", "64", "--block-length", "6"]);
    let cases: [(&[&str], &str); 4] = [
        (&["equilateral"], "row,"),
        (&["cover"], "index,class"),
        (&["renorm-check", "--m", "3"], "pair,m,bound,midpoint,width,holds"),
        (&["dichotomy-suite"], "check,status"),
    ];
    for (action, header) in cases {
        let csv = path(&dir, "out.csv");
        let mut args = vec!["geometry"];
        args.extend_from_slice(action);
        args.extend(["--family", s(&fam), "--samples", "16", "--out", s(&csv)]);
        let o = adfam(&args);
        assert!(o.status.success(), "{action:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(report(&o)["ok"], Value::Bool(true), "{action:?}");
        let text = std::fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with(header), "{action:?}: {text}");
    }
}

#[test]
fn verify_reports_every_suite() {
    let dir = TempDir::new().unwrap();
    let fam = build(&dir, "r.json", &["r-embeddable", "--count", "8", "--horizon", "64", "--block-length", "6"]);
    let copy = path(&dir, "report.json");
    let o = adfam(&["verify", "all", "--family", s(&fam), "--samples", "16", "--out", s(&copy)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r["ok"], Value::Bool(true));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&copy).unwrap()).unwrap();
    assert_eq!(saved, r);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("thm_equi") || text.contains("thm-equi"));
    assert!(text.contains("lemmas"));
}
