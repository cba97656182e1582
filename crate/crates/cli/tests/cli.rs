use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

use telic_core::barriers::ReductionReport;
use telic_core::solvers::{solve_brute, SolveReport};
use telic_core::telic::TelicInstance;
use telic_core::Budget;

fn telic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_telic"))
        .args(args)
        .env_remove("TELIC_MAX_GRID_BITS")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, v.to_string()).unwrap();
    path
}

fn instance(system: Value, homeo: &str, n: u32, lo: &str, hi: &str) -> Value {
    json!({"system": system, "homeo": {"kind": homeo}, "n": n, "target": {"lo": lo, "hi": hi}})
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_doubling_point_target() {
    let dir = TempDir::new().unwrap();
    let inst = instance(json!({"kind": "doubling"}), "identity", 2, "1/2", "1/2");
    let path = write(&dir, "i.json", &inst);
    let out = telic(&["solve", "--instance", s(&path), "--solver", "brute"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["decision"], json!(true));
    assert_eq!(v["witness"], json!("1/8"));

    // the report re-parses to exactly the library's answer
    let report: SolveReport = serde_json::from_value(v).unwrap();
    let lib: TelicInstance = serde_json::from_value(inst).unwrap();
    assert_eq!(report, solve_brute(&lib, &Budget::default()).unwrap());
}

#[test]
fn no_decision_exit_code_depends_on_mode() {
    let dir = TempDir::new().unwrap();
    let mut inst = instance(json!({"kind": "identity"}), "identity", 2, "1/32", "1/32");
    let decide = write(&dir, "d.json", &inst);
    let out = telic(&["solve", "--instance", s(&decide)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["decision"], json!(false));
    inst["mode"] = json!("search");
    let search = write(&dir, "s.json", &inst);
    assert_eq!(telic(&["solve", "--instance", s(&search)]).status.code(), Some(0));
}

#[test]
fn verify_surd_certificate() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "i.json", &instance(json!({"kind": "tent"}), "identity", 1, "0", "1"));
    let out = telic(&["verify", "--instance", s(&path), "--certificate", "sqrt2/4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["valid"], json!(false));
    let ok = telic(&["verify", "--instance", s(&path), "--certificate", "1/2"]);
    assert_eq!(json_of(&ok)["valid"], json!(true));
    let bad = telic(&["verify", "--instance", s(&path), "--certificate", "1/3"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn small_preimage_lemma() {
    let out = telic(&["lemma", "--name", "small-preimage", "--n", "10", "--k", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["injective"], json!(true));
    let pre = telic(&["lemma", "--name", "preimages", "--n", "3", "--y", "1/2"]);
    assert_eq!(json_of(&pre)["count"], json!(8));
}

#[test]
fn order_and_brute_agree() {
    let dir = TempDir::new().unwrap();
    let systems = [json!({"kind": "identity"}), json!({"kind": "squaring"}), json!({"kind": "rotation", "kappa": "-1 + sqrt2"})];
    let targets = [("0", "1/8"), ("1/4", "1/4"), ("3/8", "5/8"), ("7/8", "1")];
    for system in &systems {
        for homeo in ["identity", "alpha"] {
            for (lo, hi) in targets {
                let path = write(&dir, "i.json", &instance(system.clone(), homeo, 2, lo, hi));
                let brute = json_of(&telic(&["solve", "--instance", s(&path), "--solver", "brute"]));
                let order = json_of(&telic(&["solve", "--instance", s(&path), "--solver", "order"]));
                assert_eq!(brute["decision"], order["decision"], "{system} {homeo} [{lo}, {hi}]");
            }
        }
    }
}

#[test]
fn usage_and_malformed_input() {
    let dir = TempDir::new().unwrap();
    assert_eq!(telic(&["solve", "--frobnicate"]).status.code(), Some(2));
    assert_eq!(telic(&["launch"]).status.code(), Some(2));

    let mut inst = instance(json!({"kind": "tent"}), "identity", 2, "0", "1");
    inst["bogus"] = json!(1);
    let path = write(&dir, "bad.json", &inst);
    let out = telic(&["solve", "--instance", s(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    let path = write(&dir, "bad2.json", &json!({"system": {"kind": "tent"}, "homeo": {"kind": "identity"}, "target": {"lo": "0", "hi": "1"}}));
    let out = telic(&["solve", "--instance", s(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`n`"));

    let out = telic(&["periodic", "--map", "logistic", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resource_budget() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "i.json", &instance(json!({"kind": "tent"}), "identity", 5, "0", "1"));
    let out = telic(&["solve", "--instance", s(&path), "--max-grid-bits", "20"]);
    assert_eq!(out.status.code(), Some(3));
    let env = Command::new(env!("CARGO_BIN_EXE_telic"))
        .args(["enumerate", "--instance", s(&path)])
        .env("TELIC_MAX_GRID_BITS", "10")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(3));
}

#[test]
fn csv_out_file_and_worker_independence() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "i.json", &instance(json!({"kind": "doubling"}), "alpha", 3, "1/4", "1/2"));
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (file, workers) in [(&a, "1"), (&b, "3")] {
        let out = telic(&["enumerate", "--instance", s(&path), "--emit", "csv", "--workers", workers, "--out", s(file)]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap(), vec!["count", "witnesses", "witnesses~approx"]);
    for rec in rows.records() {
        let rec = rec.unwrap();
        let exact: telic_core::exact::Quad = rec[1].parse().unwrap();
        assert_eq!(rec[2].parse::<f64>().unwrap(), exact.to_f64());
    }
}

#[test]
fn barrier_and_fixedpoint() {
    let out = telic(&["barrier", "--name", "level1-witness", "--from", "tent", "--to", "squaring", "--r", "4"]);
    assert_eq!(json_of(&out)["witness"], json!(["1/4", "3/4"]));
    let gap = telic(&["barrier", "--name", "cardinality-gap", "--from", "tent", "--to", "squaring", "--n", "2"]);
    let v = json_of(&gap);
    assert_eq!((v["card_from"].clone(), v["card_to"].clone()), (json!(5), json!(16)));
    let fp = json_of(&telic(&["fixedpoint", "--n-max", "4"]));
    assert_eq!(fp.as_array().unwrap().len(), 4);
    assert_eq!(fp[1]["disjoint_for_all_j"], json!(true));
}

#[test]
fn semiconjugacy_from_file() {
    let dir = TempDir::new().unwrap();
    let entries: Vec<Value> = ["0", "1/4", "1/2", "3/4", "1"].iter().map(|x| json!({"x": x, "fx": x})).collect();
    let phi = write(&dir, "phi.json", &json!({"kind": "table", "entries": entries}));
    let out = telic(&["barrier", "--name", "semiconjugacy", "--from", "tent", "--to", "squaring", "--phi", s(&phi)]);
    let v = json_of(&out);
    assert_eq!(v["holds"], json!(false));
    let at = v["violations"].as_array().unwrap().iter().find(|x| x["x"] == json!("3/4")).unwrap();
    assert_eq!(at["s_phix"], json!("9/16"));
}

#[test]
fn periodic_points() {
    let v = json_of(&telic(&["periodic", "--map", "tent", "--n", "1"]));
    assert_eq!(v["points"], json!(["0", "2/3"]));
    let r = json_of(&telic(&["periodic", "--map", "rotation", "--n", "3"]));
    assert_eq!(r["count"], json!(0));
}

#[test]
fn reduction_check_round_trips() {
    let dir = TempDir::new().unwrap();
    let eta = write(&dir, "eta.json", &json!([{"from": {"lo": "1/2", "hi": "17/32"}, "to": {"lo": "1/2", "hi": "17/32"}}]));
    let out = telic(&["reduction-check", "--eta", s(&eta), "--level", "4", "--n", "2", "--bounded"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["all_pass"], json!(false));
    let report: ReductionReport = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), v);

    let search = telic(&["reduction-check", "--search", "3", "--level", "3", "--n", "2"]);
    assert_eq!(json_of(&search)["all_infeasible"], json!(false));
    assert_eq!(telic(&["reduction-check", "--level", "4", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn bss_programs() {
    let out = telic(&["bss-run", "--program", "builtin:doubling", "--input", "3/8"]);
    let v = json_of(&out);
    assert_eq!(v, json!({"output": ["3/4"], "time": 5, "halted": true}));
    let chk = json_of(&telic(&["bss-run", "--program", "builtin:precision-checker", "--input", "3/8", "--input", "3"]));
    assert_eq!(chk["output"], json!(["1"]));

    let dir = TempDir::new().unwrap();
    let prog = write(
        &dir,
        "p.json",
        &json!({"constants": ["sqrt2"], "instructions": [
            {"op": "const", "constant": 0, "dst": 2},
            {"op": "mul", "lhs": 1, "rhs": 2, "dst": 1},
            {"op": "halt"}]}),
    );
    let v = json_of(&telic(&["bss-run", "--program", s(&prog), "--input", "sqrt2/2"]));
    assert_eq!(v["output"], json!(["1"]));
    let starved = json_of(&telic(&["bss-run", "--program", s(&prog), "--input", "1", "--fuel", "0"]));
    assert_eq!((starved["halted"].clone(), starved["time"].clone()), (json!(false), json!(0)));
}
