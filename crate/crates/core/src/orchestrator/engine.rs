use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::cache::{load_features, write_cache, FeatureCache};
use super::features::{compute_features, ContractFeatures};
use super::kb::KnowledgeBase;
use crate::agents::{HttpLlmClient, LlmClient, MockClient};
use crate::config::Config;
use crate::corpus::{ContractDoc, CorpusStore};
use crate::error::{Error, Result};
use crate::extraction::PartyRegistry;
use crate::index::{build_index_with, Bm25Params, SearchIndex};
use crate::plan::{
    plan_and_repair, Attempt, Citation, LlmPlanner, MockPlanner, PlanOptions, Planner, QuerySpec, ToolDetail, ToolRegistry,
    TraceEntry, Value,
};

/// The answer to one query with everything needed to audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerEnvelope {
    pub query: QuerySpec,
    pub result: Value,
    pub rendered: String,
    pub plan_source: String,
    pub planner: String,
    pub attempts: Vec<Attempt>,
    pub trace: Vec<TraceEntry>,
    pub citations: Vec<Citation>,
    pub details: Vec<ToolDetail>,
}

impl AnswerEnvelope {
    /// Digest over everything except timings.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&self.query).unwrap_or_default());
        h.update(serde_json::to_vec(&self.result).unwrap_or_default());
        h.update(self.plan_source.as_bytes());
        for e in &self.trace {
            h.update(format!("{}\t{}\t{}\t{}\n", e.seq, e.tool, e.args_digest, e.outcome));
        }
        h.update(serde_json::to_vec(&self.citations).unwrap_or_default());
        h.update(serde_json::to_vec(&self.details).unwrap_or_default());
        hex::encode(h.finalize())
    }
}

/// The LLM client selected by `config.client`. The mock summarises around
/// the registry's party names.
pub fn build_client(config: &Config, registry: &PartyRegistry) -> Result<Arc<dyn LlmClient>> {
    match config.client.as_str() {
        "mock" => Ok(Arc::new(MockClient::new(registry.entries().iter().map(|e| e.name.clone())))),
        "http" => HttpLlmClient::from_env()
            .map(|c| Arc::new(c) as Arc<dyn LlmClient>)
            .ok_or_else(|| Error::Config("client = \"http\" needs LEXFLOW_LLM_ENDPOINT".into())),
        other => Err(Error::Config(format!("unknown client {other:?}"))),
    }
}

pub fn build_planner(config: &Config) -> Result<Box<dyn Planner>> {
    match config.planner.as_str() {
        "mock" => Ok(Box::new(MockPlanner::new())),
        "llm" => HttpLlmClient::from_env()
            .map(|c| Box::new(LlmPlanner::new(c)) as Box<dyn Planner>)
            .ok_or_else(|| Error::Config("planner = \"llm\" needs LEXFLOW_LLM_ENDPOINT".into())),
        other => Err(Error::Config(format!("unknown planner {other:?}"))),
    }
}

fn params(config: &Config) -> Bm25Params {
    Bm25Params { k1: config.index.k1, b: config.index.b, title_weight: config.index.title_weight }
}

/// Builds the section index for a store and saves it.
pub fn build_store_index(store: &CorpusStore, config: &Config) -> Result<SearchIndex> {
    let docs = store.load_all()?;
    let index = build_index_with(docs.iter().flat_map(|d| d.sections.iter().cloned()).collect(), params(config));
    index.save(&store.index_path())?;
    Ok(index)
}

fn features_for(docs: &[ContractDoc], config: &Config) -> Vec<ContractFeatures> {
    let registry = PartyRegistry::from_corpus(docs);
    compute_features(docs, &registry, config.extraction.party_threshold)
}

/// Recomputes every contract's features and rewrites the cache.
pub fn warm_cache(store: &CorpusStore, config: &Config) -> Result<FeatureCache> {
    let docs = store.load_all()?;
    write_cache(&store.cache_path(), &features_for(&docs, config))
}

/// Opens a store as a knowledge base. A missing index or a cache that does
/// not cover exactly the stored contracts is rebuilt in memory.
pub fn load_knowledge_base(store: &CorpusStore, config: &Config) -> Result<KnowledgeBase> {
    let docs = store.load_all()?;
    let ids: Vec<&str> = docs.iter().map(|d| d.contract_id.as_str()).collect();
    let index = match SearchIndex::load(&store.index_path()) {
        Ok(idx) if idx.params == params(config) && idx.contract_ids().eq(ids.iter().copied().filter(|id| {
            docs.iter().any(|d| d.contract_id == *id && !d.sections.is_empty())
        })) => idx,
        _ => build_index_with(docs.iter().flat_map(|d| d.sections.iter().cloned()).collect(), params(config)),
    };
    let features = match load_features(&store.cache_path()) {
        Ok(f) if f.iter().map(|f| f.contract_id.as_str()).eq(ids.iter().copied()) => f,
        _ => features_for(&docs, config),
    };
    let client = build_client(config, &PartyRegistry::from_corpus(&docs))?;
    KnowledgeBase::from_parts(docs, index, features, config.clone(), client)
}

/// Answers queries against a swappable knowledge-base snapshot. Queries in
/// flight keep the snapshot they started with.
pub struct Engine {
    kb: RwLock<Arc<KnowledgeBase>>,
    planner: Box<dyn Planner>,
    registry: ToolRegistry,
    opts: PlanOptions,
}

impl Engine {
    pub fn new(kb: KnowledgeBase, planner: Box<dyn Planner>) -> Self {
        let plan = &kb.config().plan;
        let opts = PlanOptions { max_attempts: plan.max_attempts, call_budget: plan.call_budget, statement_cap: plan.statement_cap };
        Self { kb: RwLock::new(Arc::new(kb)), planner, registry: ToolRegistry::standard(), opts }
    }

    /// An engine whose planner follows the knowledge base's config.
    pub fn from_config(kb: KnowledgeBase) -> Result<Self> {
        let planner = build_planner(kb.config())?;
        Ok(Self::new(kb, planner))
    }

    pub fn snapshot(&self) -> Arc<KnowledgeBase> {
        self.kb.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn swap(&self, kb: KnowledgeBase) {
        *self.kb.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(kb);
    }

    pub fn registry(&self) -> &ToolRegistry {
        &self.registry
    }

    pub fn answer(&self, query: &QuerySpec) -> Result<AnswerEnvelope> {
        query.validate()?;
        let kb = self.snapshot();
        kb.check_entities(&query.entities)?;
        let run = plan_and_repair(query, self.planner.as_ref(), &self.registry, kb.as_ref(), &self.opts);
        let attempts = run.attempts.clone();
        let (plan_source, exec) = run.into_result()?;
        let result = exec.value.clone().unwrap_or(Value::List(Vec::new()));
        let mut citations = exec.citations.clone();
        citations.sort();
        citations.dedup();
        Ok(AnswerEnvelope {
            query: query.clone(),
            rendered: result.render(),
            result,
            plan_source,
            planner: self.planner.name().to_string(),
            attempts,
            trace: exec.trace,
            citations,
            details: exec.details,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_corpus, ingest_documents, StyleMix};
    use crate::index::LexiconLabeler;
    use crate::labels::ClauseLabel;
    use crate::plan::{Entities, Task};

    fn corpus(seed: u64, families: usize) -> (Vec<ContractDoc>, crate::corpus::CorpusManifest) {
        let g = generate_corpus(seed, families, &StyleMix::default());
        let docs = ingest_documents(g.raw_inputs(), &LexiconLabeler::builtin(Config::default().index.label_threshold));
        (docs, g.manifest)
    }

    fn engine(docs: Vec<ContractDoc>) -> Engine {
        let config = Config::default();
        let client = build_client(&config, &PartyRegistry::from_corpus(&docs)).unwrap();
        Engine::from_config(KnowledgeBase::build(docs, config, client).unwrap()).unwrap()
    }

    fn fund_of(m: &crate::corpus::CorpusManifest, family: usize) -> String {
        m.families[family].parties.iter().find(|p| p.role == crate::extraction::PartyRole::Fund).unwrap().name.clone()
    }

    #[test]
    fn explore_returns_family_contracts() {
        let (docs, m) = corpus(3, 4);
        let e = engine(docs);
        let fund = fund_of(&m, 0);
        let q = QuerySpec::new(Entities { fund: Some(fund.clone()), ..Default::default() }, Task::ExploreAll);
        let env = e.answer(&q).unwrap();
        let Value::List(items) = &env.result else { panic!("{:?}", env.result) };
        let got: std::collections::BTreeSet<String> = items.iter().map(|v| v.render()).collect();
        let want: std::collections::BTreeSet<String> = m
            .families
            .iter()
            .filter(|f| f.parties.iter().any(|p| p.name == fund))
            .flat_map(|f| f.contracts.iter().map(|c| c.contract_id.clone()))
            .collect();
        assert_eq!(got, want);
        assert!(!env.citations.is_empty());
        assert_eq!(env.attempts.len(), 1);
    }

    #[test]
    fn answers_are_deterministic() {
        let (docs, m) = corpus(5, 3);
        let e = engine(docs);
        let q = QuerySpec::new(Entities { fund: Some(fund_of(&m, 1)), ..Default::default() }, Task::CompareClause)
            .with_clause(ClauseLabel::Termination);
        let a = e.answer(&q).unwrap();
        let b = e.answer(&q).unwrap();
        assert_eq!(a.digest(), b.digest());
        assert!(!a.details.is_empty());
    }

    #[test]
    fn unknown_entity_is_reported() {
        let (docs, _) = corpus(5, 2);
        let e = engine(docs);
        let q = QuerySpec::new(Entities { fund: Some("Zzyzx Quantum Holdings".into()), ..Default::default() }, Task::ExploreAll);
        assert_eq!(e.answer(&q).unwrap_err().code(), "E_UNKNOWN_ENTITY");
    }

    #[test]
    fn swap_replaces_snapshot() {
        let (docs, _) = corpus(7, 2);
        let (more, _) = corpus(8, 3);
        let e = engine(docs);
        let before = e.snapshot();
        let n = more.len();
        let config = Config::default();
        let client = build_client(&config, &PartyRegistry::from_corpus(&more)).unwrap();
        e.swap(KnowledgeBase::build(more, config, client).unwrap());
        assert_eq!(e.snapshot().len(), n);
        assert_ne!(before.len(), 0);
    }

    #[test]
    fn store_cache_round_trip_and_rewarm_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let store = CorpusStore::open(dir.path()).unwrap();
        let (docs, _) = corpus(11, 4);
        for d in &docs {
            store.save_doc(d).unwrap();
        }
        let config = Config::default();
        let first = warm_cache(&store, &config).unwrap();
        let bytes = std::fs::read(store.cache_path()).unwrap();
        assert_eq!(FeatureCache::from_csv(&bytes).unwrap(), first);
        warm_cache(&store, &config).unwrap();
        assert_eq!(std::fs::read(store.cache_path()).unwrap(), bytes);
        build_store_index(&store, &config).unwrap();
        let kb = load_knowledge_base(&store, &config).unwrap();
        assert_eq!(kb.len(), docs.len());
        let direct = features_for(&docs, &config);
        assert_eq!(kb.all_features().cloned().collect::<Vec<_>>(), {
            let mut d = direct;
            d.sort_by(|a, b| a.contract_id.cmp(&b.contract_id));
            d
        });
    }
}
