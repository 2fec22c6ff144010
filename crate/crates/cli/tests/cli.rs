use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use vkinv_core::algebra::{Context, GradedPolynomial, JsonTerm};

const VK31: &str = "PD[X[1,5,2,4],X[5,4,6,3],Y[6,3,1,2]]";
const FIXTURES: &str = include_str!("../../../fixtures/knots.tsv");

fn vkinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vkinv")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = vkinv(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn poly_of(record: &Value) -> GradedPolynomial {
    let terms: Vec<JsonTerm> = serde_json::from_value(record["terms"].clone()).unwrap();
    let context = if record["context"] == "Dimension" { Context::Dimension } else { Context::Integer };
    GradedPolynomial::from_json_terms(&terms, context).unwrap()
}

fn table(rows: &[&str]) -> String {
    FIXTURES
        .lines()
        .filter(|l| rows.iter().any(|r| l.split('\t').next() == Some(*r)))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn cache_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|e| e == "json")).collect();
    v.sort();
    v
}

#[test]
fn kh_of_the_virtual_trefoil() {
    assert_eq!(ok(&["compute", "--pd", VK31, "--invariant", "kh"]).trim(), "q^-1 + q");
}

#[test]
fn unknot_values() {
    assert_eq!(ok(&["compute", "--pd", "PD[L[1]]", "--invariant", "akh"]).trim(), "q^-1 + q");
    assert_eq!(ok(&["compute", "--gauss", "O1+,U1+", "--invariant", "jones"]).trim(), "1");
}

#[test]
fn parity_map_as_json() {
    let v = json(&["compute", "--gauss", "O1-,O2-,U1-,O3+,U2-,U3+", "--invariant", "parity", "--format", "json"]);
    let parity = &v["scalars"];
    assert_eq!(parity["1"], "odd");
    assert_eq!(parity["2"], "even");
    assert_eq!(parity["3"], "odd");
}

#[test]
fn json_terms_parse_back_to_the_text_value() {
    for inv in ["akh", "arrow", "parity-bracket", "parity-arrow"] {
        let text = ok(&["compute", "--pd", VK31, "--invariant", inv]);
        let v = json(&["compute", "--pd", VK31, "--invariant", inv, "--format", "json"]);
        let from_json = poly_of(&v);
        if !text.contains('D') {
            let from_text = GradedPolynomial::parse(text.trim()).unwrap().with_context(from_json.context());
            assert_eq!(from_text, from_json, "{inv}");
        }
        assert!(!from_json.is_zero(), "{inv}");
    }
}

#[test]
fn exit_codes() {
    let bad = vkinv(&["compute", "--pd", "PD[X[1,2,3]]", "--invariant", "kh"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(!bad.stderr.is_empty());
    let big = vkinv(&["compute", "--pd", VK31, "--invariant", "kh", "--max-crossings", "2"]);
    assert_eq!(big.status.code(), Some(3));
    let undefined = "PD[X[4,2,5,1],X[11,4,12,3],X[14,8,15,7],Y[16,3,1,2],Y[13,9,14,8],Y[12,16,13,15],X[6,10,7,9],Y[10,6,11,5]]";
    let o = vkinv(&["compute", "--pd", undefined, "--invariant", "akh"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("d^2 != 0"));
}

#[test]
fn output_is_deterministic() {
    let args = ["compute", "--pd", VK31, "--invariant", "parity-akh", "--format", "json"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn cache_hits_reproduce_bytes_and_survive_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["compute", "--pd", VK31, "--invariant", "akh", "--format", "json", "--cache", cache];
    let cold = ok(&args);
    let files = cache_files(dir.path());
    assert_eq!(files.len(), 1);
    assert_eq!(ok(&args), cold);

    fs::write(&files[0], "{ not json").unwrap();
    let o = vkinv(&args);
    assert!(o.status.success());
    assert_eq!(stdout(&o), cold);
    assert!(String::from_utf8_lossy(&o.stderr).contains("corrupt"));
    let rewritten: Value = serde_json::from_str(&fs::read_to_string(&files[0]).unwrap()).unwrap();
    assert_eq!(rewritten["invariant"], "akh");

    // a different option is a different key
    ok(&["compute", "--pd", VK31, "--invariant", "parity-akh", "--parity-level", "2", "--cache", cache]);
    ok(&["compute", "--pd", VK31, "--invariant", "parity-akh", "--parity-level", "1", "--cache", cache]);
    assert_eq!(cache_files(dir.path()).len(), 3);
}

#[test]
fn stale_cache_entries_are_not_trusted() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["compute", "--pd", VK31, "--invariant", "kh", "--format", "json", "--cache", cache];
    let cold = ok(&args);
    let file = &cache_files(dir.path())[0];
    let mut v: Value = serde_json::from_str(&fs::read_to_string(file).unwrap()).unwrap();
    v["version"] = Value::from("0.0.0-old");
    v["terms"] = Value::Array(vec![]);
    fs::write(file, v.to_string()).unwrap();
    assert_eq!(ok(&args), cold);
}

#[test]
fn unwritable_cache_falls_back_to_computing() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = vkinv(&["compute", "--pd", VK31, "--invariant", "kh", "--cache", blocker.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "q^-1 + q");
}

#[test]
fn batch_groups_table_one_by_parity_akh() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table1.tsv");
    let rows = ["6.5508", "6.5627", "6.7613", "6.7701", "6.24828", "6.37012", "6.60677", "6.65816"];
    fs::write(&path, table(&rows)).unwrap();
    let out = dir.path().join("records.jsonl");
    let summary = json(&[
        "batch",
        path.to_str().unwrap(),
        "--invariant",
        "akh,parity-akh",
        "--out",
        out.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(summary["rows"], 8);
    assert_eq!(summary["records"], 16);
    assert_eq!(summary["failures"], 0);
    assert_eq!(summary["classes"]["akh"].as_array().unwrap().len(), 1);
    let classes = summary["classes"]["parity-akh"].as_array().unwrap();
    assert_eq!(classes.iter().map(|c| c.as_array().unwrap().len()).collect::<Vec<_>>(), [4, 4]);
    // the two printed values are mirror images of each other
    let tolerant = json(&["batch", path.to_str().unwrap(), "--invariant", "parity-akh", "--format", "json", "--mirror-tolerant"]);
    assert_eq!(tolerant["classes"]["parity-akh"].as_array().unwrap().len(), 1);
    let lines: Vec<Value> = fs::read_to_string(&out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 16);
    assert_eq!(lines[0]["name"], "6.5508");
    assert_eq!(lines[0]["invariant"], "akh");
}

#[test]
fn batch_reports_pairs_kh_cannot_separate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.tsv");
    fs::write(&path, table(&["5.129", "5.267"])).unwrap();
    let summary = json(&["batch", path.to_str().unwrap(), "--invariant", "kh,akh", "--format", "json"]);
    let pairs = summary["distinguishing_pairs"].as_array().unwrap();
    assert!(pairs.iter().any(|p| p["equal"] == "kh" && p["unequal"] == "akh" && p["rows"] == serde_json::json!(["5.129", "5.267"])));
}

#[test]
fn batch_of_nothing_and_of_bad_rows() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.tsv");
    fs::write(&empty, "# nothing here\n\n").unwrap();
    let summary = json(&["batch", empty.to_str().unwrap(), "--invariant", "kh", "--format", "json"]);
    assert_eq!(summary["rows"], 0);
    assert_eq!(summary["records"], 0);

    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, format!("good\t{VK31}\nbroken\tPD[X[1,2]]\n")).unwrap();
    let out = dir.path().join("out.jsonl");
    let summary = json(&["batch", bad.to_str().unwrap(), "--invariant", "kh", "--out", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(summary["records"], 1);
    assert_eq!(summary["failures"], 1);
    let text = fs::read_to_string(&out).unwrap();
    let second: Value = serde_json::from_str(text.lines().nth(1).unwrap()).unwrap();
    assert_eq!(second["name"], "broken");
    assert!(second["error"].is_string());
}

#[test]
fn genus_bounds_of_the_virtual_trefoil() {
    let v = json(&["genus", "--pd", VK31, "--format", "json"]);
    assert_eq!(v["scalars"]["arrow"], 1);
    assert_eq!(v["scalars"]["carrier-genus"], 2);
}

#[test]
fn extra_registry_entries_are_used() {
    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("reg.tsv");
    fs::write(&reg, "1.0,1.1,1.2,1.3|0.0,0.1,0.2,0.3\tTheta\t1\n").unwrap();
    let text = ok(&["compute", "--pd", VK31, "--invariant", "parity-bracket", "--registry", reg.to_str().unwrap()]);
    assert!(text.contains("Theta"), "{text}");
}

#[test]
fn selftest_passes() {
    let out = ok(&["selftest"]);
    assert!(!out.contains("FAIL"));
}
