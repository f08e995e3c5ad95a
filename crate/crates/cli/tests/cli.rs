use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lexflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexflow")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(args: &[&str]) -> String {
    let o = lexflow(args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

fn first_fund(m: &Value) -> String {
    m["families"][0]["parties"].as_array().unwrap().iter().find(|p| p["role"] == "fund").unwrap()["name"].as_str().unwrap().to_string()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lexflow(&[]).status.code(), Some(2));
    assert_eq!(lexflow(&["ask"]).status.code(), Some(2));
    assert_eq!(lexflow(&["eval", "run", "--system", "oracle", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn synth_one_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    ok(&["corpus", "synth", "--seed", "42", "--families", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(manifest(&out)["families"].as_array().unwrap().len(), 1);
}

#[test]
fn ingest_index_cache_ask_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("src");
    let store = dir.path().join("store");
    let (src_s, store_s) = (src.to_str().unwrap(), store.to_str().unwrap());
    ok(&["corpus", "synth", "--seed", "5", "--families", "3", "--out", src_s]);
    ok(&["ingest", "--in", src_s, "--out", store_s]);
    ok(&["index", "build", "--store", store_s]);
    ok(&["cache", "warm", "--store", store_s]);
    let csv = std::fs::read_to_string(store.join("cache.csv")).unwrap();
    let m = manifest(&src);
    let n: usize = m["families"].as_array().unwrap().iter().map(|f| f["contracts"].as_array().unwrap().len()).sum();
    assert_eq!(csv.lines().count(), n + 1);

    let fund = first_fund(&m);
    let env: Value = serde_json::from_str(&ok(&["ask", "--store", store_s, "--fund", &fund, "--task", "find_master_agreements", "--json"])).unwrap();
    assert_eq!(env["result"]["value"][0]["value"], m["families"][0]["master_id"]);
    let text = ok(&["ask", "--store", store_s, "--fund", &fund, "--task", "compare_clause", "--clause", "authorized persons"]);
    assert!(text.contains("attempt(s)"));

    let o = lexflow(&["ask", "--store", store_s, "--fund", "Nonexistent Fund", "--task", "explore_all"]);
    assert_eq!(o.status.code(), Some(1));
    let problem: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(problem["code"], "E_UNKNOWN_ENTITY");

    let o = lexflow(&["ask", "--store", store_s, "--fund", &fund, "--task", "summarize_clause"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("E_INVALID_QUERY"));

    let dataset = dir.path().join("cases.json");
    ok(&["eval", "build", "--store", store_s, "--seed", "3", "--per-combo", "2", "--analytical", "1", "--out", dataset.to_str().unwrap()]);
    let cases: Value = serde_json::from_slice(&std::fs::read(&dataset).unwrap()).unwrap();
    assert_eq!(cases.as_array().unwrap().len(), 6 * (5 * 2 + 2));
    let card = dir.path().join("card.json");
    let table = ok(&["eval", "run", "--store", store_s, "--system", "law", "--seed", "3", "--dataset", dataset.to_str().unwrap(), "--out", card.to_str().unwrap()]);
    assert!(table.lines().any(|l| l.starts_with("Find parties")));
    let card: Value = serde_json::from_slice(&std::fs::read(&card).unwrap()).unwrap();
    assert_eq!(card["card"]["system"], "law");
}

#[test]
fn synthetic_eval_populates_retrieval_rows() {
    let table = ok(&["eval", "run", "--system", "law", "--seed", "7", "--contracts", "60", "--csv"]);
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "task,metric,cases,law,baseline");
    for task in ["explore_all", "find_master_agreements", "find_master_dates", "find_termination_dates", "find_parties"] {
        let row = rows.iter().find(|r| r.starts_with(task)).unwrap();
        let law = row.split(',').nth(3).unwrap();
        assert!(law.parse::<f64>().is_ok(), "{row}");
    }
}

#[test]
fn bad_config_is_a_problem_detail() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[agents]\ncontext_limit = 10\nchunk_size = 20\n").unwrap();
    let o = lexflow(&["--config", cfg.to_str().unwrap(), "index", "build", "--store", dir.path().join("s").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("E_CONFIG"));
}
