//! JSON-over-HTTP front end for the query engine.
//!
//! | Method | Path | Body / result |
//! |---|---|---|
//! | POST | `/query` | `QuerySpec` → `AnswerEnvelope` |
//! | GET | `/contracts` | list of `ContractSummary` |
//! | GET | `/contracts/{id}` | `ContractDetail` |
//! | GET | `/contracts/{id}/sections?clause=<label>` | list of sections |
//! | GET | `/cache.csv` | the feature cache as CSV |
//! | POST | `/admin/ingest` | `IngestRequest` → `IngestResponse` |
//! | GET | `/health` | `Health` |
//!
//! Errors are `{code, message, locus?}` problem details.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use lexflow::corpus::{ingest_dir, ingest_documents, ContractDoc, CorpusStore, FilingMeta, RawInput, SectionSpan};
use lexflow::extraction::{CalendarDate, PartyRegistry};
use lexflow::index::LexiconLabeler;
use lexflow::orchestrator::{
    build_client, build_store_index, load_knowledge_base, warm_cache, ContractFeatures, Engine, FeatureCache, KnowledgeBase,
    QuerySpec,
};
use lexflow::{ClauseLabel, Config, Error, ProblemDetail};

pub struct AppState {
    engine: Engine,
    store: Option<CorpusStore>,
    config: Config,
    ingest: tokio::sync::Mutex<()>,
}

impl AppState {
    pub fn new(engine: Engine, store: Option<CorpusStore>) -> Self {
        let config = engine.snapshot().config().clone();
        Self { engine, store, config, ingest: tokio::sync::Mutex::new(()) }
    }

    /// Serves a store's corpus, index and cache.
    pub fn from_store(store: CorpusStore, config: &Config) -> lexflow::Result<Self> {
        let kb = load_knowledge_base(&store, config)?;
        Ok(Self::new(Engine::from_config(kb)?, Some(store)))
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }
}

/// A problem detail with its HTTP status.
#[derive(Debug)]
pub struct ApiError(StatusCode, ProblemDetail);

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e.code() {
            "E_NOT_FOUND" => StatusCode::NOT_FOUND,
            "E_INVALID_QUERY" | "E_FORMAT" | "E_CONFIG" => StatusCode::BAD_REQUEST,
            "E_UNKNOWN_ENTITY" | "E_EXHAUSTED" | "E_INSUFFICIENT_CORPUS" => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_problem())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| {
        ApiError(
            StatusCode::BAD_REQUEST,
            ProblemDetail { code: "E_FORMAT".into(), message: e.to_string(), locus: Some(format!("line {} column {}", e.line(), e.column())) },
        )
    })
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> lexflow::Result<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f).await.map_err(|e| {
        ApiError(StatusCode::INTERNAL_SERVER_ERROR, ProblemDetail { code: "E_INTERNAL".into(), message: e.to_string(), locus: None })
    })?
    .map_err(ApiError::from)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractSummary {
    pub contract_id: String,
    pub accession_no: String,
    pub title: String,
    pub effective_date: Option<CalendarDate>,
    pub is_master: bool,
    pub master_id: Option<String>,
    pub section_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionHeader {
    pub ordinal: usize,
    pub heading_text: String,
    pub title_label: ClauseLabel,
    pub start_offset: usize,
    pub end_offset: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractDetail {
    pub contract: ContractDoc,
    pub features: Option<ContractFeatures>,
    pub sections: Vec<SectionHeader>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub contracts: usize,
    pub planner: String,
    pub client: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct InlineDocument {
    pub contract_id: String,
    pub markup: String,
    #[serde(default)]
    pub meta: FilingMeta,
}

/// Either a server-side directory of `*.htm` files or inline documents.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct IngestRequest {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub documents: Vec<InlineDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestResponse {
    pub ingested: Vec<String>,
    pub contracts: usize,
}

#[derive(Debug, Deserialize)]
struct SectionQuery {
    clause: Option<String>,
}

fn title(doc: &ContractDoc) -> String {
    doc.plain_text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("").to_string()
}

async fn health(State(s): State<Arc<AppState>>) -> Json<Health> {
    let kb = s.engine.snapshot();
    Json(Health { status: "ok".into(), contracts: kb.len(), planner: s.config.planner.clone(), client: kb.client().name().to_string() })
}

async fn query(State(s): State<Arc<AppState>>, body: Bytes) -> ApiResult<Response> {
    let spec: QuerySpec = parse_body(&body)?;
    let state = s.clone();
    let env = blocking(move || state.engine.answer(&spec)).await?;
    Ok(Json(env).into_response())
}

async fn contracts(State(s): State<Arc<AppState>>) -> Json<Vec<ContractSummary>> {
    let kb = s.engine.snapshot();
    Json(
        kb.docs()
            .map(|d| {
                let f = kb.features(&d.contract_id);
                ContractSummary {
                    contract_id: d.contract_id.clone(),
                    accession_no: d.accession_no.clone(),
                    title: title(d),
                    effective_date: f.and_then(|f| f.dates.effective),
                    is_master: f.is_some_and(|f| f.is_master),
                    master_id: f.and_then(|f| f.master_id.clone()),
                    section_count: d.sections.len(),
                }
            })
            .collect(),
    )
}

fn header_of(s: &SectionSpan) -> SectionHeader {
    SectionHeader {
        ordinal: s.ordinal,
        heading_text: s.heading_text.clone(),
        title_label: s.title_label,
        start_offset: s.start_offset,
        end_offset: s.end_offset,
    }
}

async fn contract(State(s): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<ContractDetail>> {
    let kb = s.engine.snapshot();
    let doc = kb.doc(&id).ok_or_else(|| Error::NotFound(format!("contract {id}")))?;
    Ok(Json(ContractDetail {
        contract: doc.clone(),
        features: kb.features(&id).cloned(),
        sections: doc.sections.iter().map(header_of).collect(),
    }))
}

async fn sections(
    State(s): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<SectionQuery>,
) -> ApiResult<Json<Vec<SectionSpan>>> {
    let kb = s.engine.snapshot();
    let doc = kb.doc(&id).ok_or_else(|| Error::NotFound(format!("contract {id}")))?;
    let label = match q.clause.as_deref() {
        Some(c) => Some(c.parse::<ClauseLabel>().map_err(Error::InvalidQuery)?),
        None => None,
    };
    Ok(Json(doc.sections.iter().filter(|sec| label.is_none_or(|l| sec.title_label == l)).cloned().collect()))
}

async fn cache_csv(State(s): State<Arc<AppState>>) -> ApiResult<Response> {
    let kb = s.engine.snapshot();
    let features: Vec<ContractFeatures> = kb.all_features().cloned().collect();
    let bytes = FeatureCache::from_features(&features).to_csv()?;
    Ok(([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], bytes).into_response())
}

fn reingest(state: &AppState, req: IngestRequest) -> lexflow::Result<IngestResponse> {
    let labeler = LexiconLabeler::builtin(state.config.index.label_threshold);
    let inputs: Vec<RawInput> = req
        .documents
        .into_iter()
        .map(|d| RawInput { contract_id: d.contract_id, markup: d.markup, meta: d.meta })
        .collect();
    if req.dir.is_none() && inputs.is_empty() {
        return Err(Error::InvalidQuery("ingest needs a dir or documents".into()));
    }
    let mut ingested = Vec::new();
    let kb = match &state.store {
        Some(store) => {
            if let Some(dir) = &req.dir {
                ingested.extend(ingest_dir(dir, store, &labeler)?);
            }
            for doc in ingest_documents(inputs, &labeler) {
                store.save_doc(&doc)?;
                ingested.push(doc.contract_id);
            }
            build_store_index(store, &state.config)?;
            warm_cache(store, &state.config)?;
            load_knowledge_base(store, &state.config)?
        }
        None => {
            if req.dir.is_some() {
                return Err(Error::InvalidQuery("this server has no corpus store; send documents inline".into()));
            }
            let new = ingest_documents(inputs, &labeler);
            ingested.extend(new.iter().map(|d| d.contract_id.clone()));
            let mut docs: Vec<ContractDoc> =
                state.engine.snapshot().docs().filter(|d| !ingested.contains(&d.contract_id)).cloned().collect();
            docs.extend(new);
            let client = build_client(&state.config, &PartyRegistry::from_corpus(&docs))?;
            KnowledgeBase::build(docs, state.config.clone(), client)?
        }
    };
    let contracts = kb.len();
    state.engine.swap(kb);
    ingested.sort();
    ingested.dedup();
    Ok(IngestResponse { ingested, contracts })
}

async fn ingest(State(s): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<IngestResponse>> {
    let req: IngestRequest = parse_body(&body)?;
    let _guard = s.ingest.lock().await;
    let state = s.clone();
    Ok(Json(blocking(move || reingest(&state, req)).await?))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/query", post(query))
        .route("/contracts", get(contracts))
        .route("/contracts/:id", get(contract))
        .route("/contracts/:id/sections", get(sections))
        .route("/cache.csv", get(cache_csv))
        .route("/admin/ingest", post(ingest))
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
