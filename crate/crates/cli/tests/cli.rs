use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn posetsearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posetsearch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    stdout(out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const WORKED_EXAMPLE: &str = "1,3,5,10,13\n2,4,7,11,14\n6,8,9,15,21\n12,16,17,20,24\n18,19,22,23,25\n";

#[test]
fn gen_grid_writes_poset_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&posetsearch(&["gen", "grid", "--d", "2", "--m", "3", "--out", p(dir.path())]));
    let inst = std::fs::read_to_string(dir.path().join("grid.instance")).unwrap();
    let poset: poset_search::oracle::ConcreteInstance = inst.parse().unwrap();
    assert_eq!(poset.poset.len(), 9);
    assert_eq!(poset.poset.covers().len(), 12);
    let csv = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    let array = poset_search::array::SortedArray2D::from_csv(&csv).unwrap();
    assert_eq!(array.cells(), poset.values.as_slice());
}

#[test]
fn gen_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        stdout(&posetsearch(&["gen", "random", "--n", "12", "--seed", "5", "--out", p(dir.path())]));
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("random.instance")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn gen_chain() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&posetsearch(&["gen", "chain", "--n", "8", "--out", p(dir.path())]));
    let text = std::fs::read_to_string(dir.path().join("chain.instance")).unwrap();
    let inst: poset_search::oracle::ConcreteInstance = text.parse().unwrap();
    assert_eq!(inst.poset.len(), 8);
    assert_eq!(inst.poset.height(), 8);
}

#[test]
fn worked_example_in_two_levels() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    std::fs::write(&csv, WORKED_EXAMPLE).unwrap();
    let out = posetsearch(&["run", "array2d-c", "--instance", p(&csv), "--target", "11"]);
    let r = &records(&out)[0];
    assert_eq!(r["found"], serde_json::json!([1, 3]));
    assert_eq!(r["detail"]["levels"], 2);
}

#[test]
fn forest_on_antichain_of_four() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&posetsearch(&["gen", "antichain", "--n", "4", "--out", p(dir.path())]));
    let inst = dir.path().join("antichain.instance");
    let out = posetsearch(&["run", "forest", "--instance", p(&inst), "--trials", "16"]);
    for r in records(&out) {
        assert_eq!(r["found"], r["instance"]["target"][0]);
        let l = &r["ledger"];
        assert!(l["classical"].as_u64().unwrap() + l["quantum"].as_u64().unwrap() <= 3);
    }
}

#[test]
fn zero_trials_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&posetsearch(&["gen", "chain", "--n", "5", "--out", p(dir.path())]));
    let inst = dir.path().join("chain.instance");
    let out = posetsearch(&["run", "forest", "--instance", p(&inst), "--trials", "0"]);
    assert_eq!(stdout(&out), "");
}

#[test]
fn records_replay() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&posetsearch(&["gen", "grid", "--m", "16", "--out", p(dir.path())]));
    let csv = dir.path().join("grid.csv");
    let args = ["run", "array2d-q", "--instance", p(&csv), "--trials", "6", "--seed", "3"];
    let first = stdout(&posetsearch(&args));
    assert_eq!(first, stdout(&posetsearch(&args)));
    let recs: Vec<Value> = first.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let typed: Vec<poset_search::oracle::QueryLedger> = recs
        .iter()
        .map(|r| serde_json::from_value(r["ledger"].clone()).unwrap())
        .collect();
    assert_eq!(typed.len(), 6);
}

#[test]
fn analyze_reports() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.poset");
    std::fs::write(&s, "poset 5\n0 2\n1 2\n2 3\n2 4\n").unwrap();
    let r: Value = serde_json::from_str(&stdout(&posetsearch(&["analyze", p(&s)]))).unwrap();
    assert_eq!(r["decision_depth"], 3);
    assert_eq!(r["width"], 2);

    stdout(&posetsearch(&["gen", "antichain", "--n", "8", "--out", p(dir.path())]));
    let a = dir.path().join("antichain.instance");
    let r: Value = serde_json::from_str(&stdout(&posetsearch(&["analyze", p(&a)]))).unwrap();
    assert_eq!((r["gamma"]["numer"].as_u64(), r["gamma"]["denom"].as_u64()), (Some(1), Some(8)));
    assert_eq!(r["ideals"], 256);
    assert_eq!(r["decision_depth"], 8);

    stdout(&posetsearch(&["gen", "chain", "--n", "7", "--out", p(dir.path())]));
    let c = dir.path().join("chain.instance");
    let r: Value = serde_json::from_str(&stdout(&posetsearch(&["analyze", p(&c)]))).unwrap();
    assert_eq!(r["width"], 1);
    assert_eq!(r["ideals"], 8);
}

#[test]
fn scale_emits_table_and_fit() {
    let out = posetsearch(&["scale", "array2d-c", "--from", "16", "--to", "64", "--trials", "3", "--format", "csv"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("size,trials,mean,max,mean_per_log2"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 6);
    assert!(text.contains("# fit slope="));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&posetsearch(&["gen", "lists", "--n", "64", "--m", "64", "--z", "16", "--out", p(dir.path())]));
    let (l, m) = (dir.path().join("L.txt"), dir.path().join("M.txt"));
    let out = posetsearch(&["run", "intersect-single", "--instance", p(&l), "--second", p(&m)]);
    assert_eq!(out.status.code(), Some(2));

    let out = posetsearch(&["run", "forest", "--instance", p(&dir.path().join("missing"))]);
    assert_eq!(out.status.code(), Some(1));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "3 2 1\n").unwrap();
    let out = posetsearch(&["run", "intersect-multi", "--instance", p(&bad), "--second", p(&m)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn budget_caps_a_trial() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&posetsearch(&["gen", "chain", "--n", "64", "--out", p(dir.path())]));
    let inst = dir.path().join("chain.instance");
    let out = posetsearch(&["run", "forest", "--instance", p(&inst), "--budget", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn intersection_output_fields() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&posetsearch(&["gen", "lists", "--n", "32", "--m", "32", "--z", "1", "--out", p(dir.path())]));
    let (l, m) = (dir.path().join("L.txt"), dir.path().join("M.txt"));
    let out = posetsearch(&["run", "intersect-multi", "--instance", p(&l), "--second", p(&m), "--trials", "4"]);
    let lists: Vec<Vec<i64>> = [&l, &m]
        .iter()
        .map(|f| {
            std::fs::read_to_string(f)
                .unwrap()
                .split_whitespace()
                .map(|t| t.parse().unwrap())
                .collect()
        })
        .collect();
    for r in records(&out) {
        let f = &r["found"];
        if f.is_null() {
            continue;
        }
        let v = f["value"].as_i64().unwrap();
        assert_eq!(lists[0][f["index_L"].as_u64().unwrap() as usize], v);
        assert_eq!(lists[1][f["index_M"].as_u64().unwrap() as usize], v);
        assert!(f["queries_L"].as_u64().is_some() && f["round"].as_u64().is_some());
    }
}
