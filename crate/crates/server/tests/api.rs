use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use lexflow::corpus::{generate_corpus, ingest_documents, CorpusManifest, CorpusStore, StyleMix};
use lexflow::extraction::{PartyRegistry, PartyRole};
use lexflow::index::LexiconLabeler;
use lexflow::orchestrator::{build_client, Engine, KnowledgeBase};
use lexflow::Config;
use lexflow_server::{router, AppState};

fn app_with(seed: u64, families: usize) -> (axum::Router, CorpusManifest, Arc<AppState>) {
    let g = generate_corpus(seed, families, &StyleMix::default());
    let config = Config::default();
    let docs = ingest_documents(g.raw_inputs(), &LexiconLabeler::builtin(config.index.label_threshold));
    let client = build_client(&config, &PartyRegistry::from_corpus(&docs)).unwrap();
    let engine = Engine::from_config(KnowledgeBase::build(docs, config, client).unwrap()).unwrap();
    let state = Arc::new(AppState::new(engine, None));
    (router(state.clone()), g.manifest, state)
}

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn call_json(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (s, b) = call(app, method, uri, body).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

fn fund(m: &CorpusManifest) -> String {
    m.families[0].parties.iter().find(|p| p.role == PartyRole::Fund).unwrap().name.clone()
}

#[tokio::test]
async fn health_reports_corpus_size() {
    let (app, m, _) = app_with(2, 2);
    let (s, v) = call_json(&app, "GET", "/health", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["contracts"].as_u64().unwrap() as usize, m.contracts().count());
}

#[tokio::test]
async fn query_returns_envelope_with_citations() {
    let (app, m, _) = app_with(4, 2);
    let (s, v) = call_json(&app, "POST", "/query", Some(json!({"entities": {"fund": fund(&m)}, "task": "find_termination_dates"}))).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    let items = v["result"]["value"].as_array().unwrap();
    let fam = &m.families[0];
    for c in &fam.contracts {
        let want = format!("{}|{}", c.contract_id, c.termination_text());
        assert!(v["rendered"].as_str().unwrap().lines().any(|l| l == want), "missing {want}");
    }
    assert!(!items.is_empty());
    assert!(!v["citations"].as_array().unwrap().is_empty());
    assert!(v["plan_source"].as_str().unwrap().contains("get_lifecycle"));
}

#[tokio::test]
async fn query_errors_are_problem_details() {
    let (app, _, _) = app_with(4, 1);
    let (s, v) = call_json(&app, "POST", "/query", Some(json!({"entities": {"fund": "Nonexistent Fund"}, "task": "explore_all"}))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["code"], "E_UNKNOWN_ENTITY");
    let (s, v) = call_json(&app, "POST", "/query", Some(json!({"entities": {"fund": "X"}, "task": "summarize_clause"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "E_INVALID_QUERY");
    let (s, v) = call_json(&app, "POST", "/query", Some(json!({"task": 3}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "E_FORMAT");
}

#[tokio::test]
async fn contracts_and_sections() {
    let (app, m, _) = app_with(6, 2);
    let (s, v) = call_json(&app, "GET", "/contracts", None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v.as_array().unwrap().len(), m.contracts().count());
    let master = &m.families[0].master_id;
    let (s, v) = call_json(&app, "GET", &format!("/contracts/{master}"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["contract"]["contract_id"], master.as_str());
    assert_eq!(v["features"]["is_master"], true);
    let (s, v) = call_json(&app, "GET", &format!("/contracts/{master}/sections?clause=termination"), None).await;
    assert_eq!(s, StatusCode::OK);
    let secs = v.as_array().unwrap();
    assert!(!secs.is_empty());
    assert!(secs.iter().all(|s| s["title_label"] == "termination"));
    let (s, v) = call_json(&app, "GET", &format!("/contracts/{master}/sections?clause=bogus"), None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "E_INVALID_QUERY");
    let (s, v) = call_json(&app, "GET", "/contracts/nope", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["code"], "E_NOT_FOUND");
}

#[tokio::test]
async fn cache_csv_has_header_and_rows() {
    let (app, m, _) = app_with(8, 2);
    let (s, b) = call(&app, "GET", "/cache.csv", None).await;
    assert_eq!(s, StatusCode::OK);
    let text = String::from_utf8(b).unwrap();
    assert!(text.starts_with("contract_id,accession_no,effective_date"));
    assert_eq!(text.lines().count(), m.contracts().count() + 1);
}

#[tokio::test]
async fn inline_ingest_swaps_snapshot() {
    let (app, m, state) = app_with(10, 1);
    let before = state.engine().snapshot().len();
    let extra = generate_corpus(11, 1, &StyleMix::default());
    let documents: Vec<Value> = extra
        .docs
        .iter()
        .map(|d| json!({"contract_id": d.contract_id.clone() + "-x", "markup": d.raw_markup, "meta": d.meta()}))
        .collect();
    let (s, v) = call_json(&app, "POST", "/admin/ingest", Some(json!({"documents": documents}))).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["contracts"].as_u64().unwrap() as usize, before + extra.docs.len());
    assert_eq!(state.engine().snapshot().len(), before + extra.docs.len());
    let (s, _) = call_json(&app, "POST", "/query", Some(json!({"entities": {"fund": fund(&m)}, "task": "explore_all"}))).await;
    assert_eq!(s, StatusCode::OK);
    let (s, v) = call_json(&app, "POST", "/admin/ingest", Some(json!({}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["code"], "E_INVALID_QUERY");
}

#[tokio::test]
async fn store_backed_ingest_from_dir() {
    let src = tempfile::tempdir().unwrap();
    let root = tempfile::tempdir().unwrap();
    let g = generate_corpus(12, 2, &StyleMix::default());
    g.write_to_dir(src.path()).unwrap();
    let store = CorpusStore::open(root.path()).unwrap();
    let state = Arc::new(AppState::from_store(store.clone(), &Config::default()).unwrap());
    let app = router(state.clone());
    assert_eq!(state.engine().snapshot().len(), 0);
    let (s, v) = call_json(&app, "POST", "/admin/ingest", Some(json!({"dir": src.path()}))).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["contracts"].as_u64().unwrap() as usize, g.docs.len());
    assert!(store.cache_path().exists() && store.index_path().exists());
    let (s, _) = call_json(&app, "POST", "/query", Some(json!({"entities": {"fund": fund(&g.manifest)}, "task": "find_master_agreements"}))).await;
    assert_eq!(s, StatusCode::OK);
}
