use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    answer_baseline, attach_references, build_dataset, normalize_item, recall, BaselineAnswer, CaseKind, CaseResult, EvalCase, Metric,
    ScoreCard, SimilarityScorer, SystemKind, TokenF1,
};
use crate::config::Config;
use crate::corpus::{generate_corpus_sized, ingest_documents, CorpusManifest, StyleMix};
use crate::error::Result;
use crate::extraction::PartyRegistry;
use crate::index::LexiconLabeler;
use crate::orchestrator::{build_client, Engine, KnowledgeBase};
use crate::plan::{Task, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRun {
    pub card: ScoreCard,
    pub results: Vec<CaseResult>,
    pub elapsed_ms: u64,
}

fn items_of(v: &Value) -> Vec<String> {
    match v {
        Value::List(items) => items.iter().map(Value::render).collect(),
        _ => Vec::new(),
    }
}

fn missing(retrieved: &[String], truth: &[String]) -> Vec<String> {
    let got: BTreeSet<String> = retrieved.iter().map(|s| normalize_item(s)).collect();
    truth.iter().filter(|t| !got.contains(&normalize_item(t))).cloned().collect()
}

fn score_case(case: &EvalCase, system: SystemKind, engine: &Engine, kb: &KnowledgeBase, scorer: &dyn SimilarityScorer) -> CaseResult {
    let metric = match case.kind {
        CaseKind::Retrieval => Metric::HitRate,
        CaseKind::Analytical => Metric::SimilarityF1,
    };
    let mut r = CaseResult {
        case_id: case.id.clone(),
        task: case.query.task,
        combo: case.combo.clone(),
        metric,
        score: Some(0.0),
        missing: Vec::new(),
        error: None,
    };
    let reference = case.reference.as_deref().unwrap_or("");
    match system {
        SystemKind::Law => match engine.answer(&case.query) {
            Ok(env) if case.kind == CaseKind::Retrieval => {
                let got = items_of(&env.result);
                r.score = Some(recall(&got, &case.truth));
                r.missing = missing(&got, &case.truth);
            }
            Ok(env) => {
                let text = match &env.result {
                    Value::Text(t) => t.as_str(),
                    _ => "",
                };
                r.score = Some(scorer.score(text, reference));
            }
            Err(e) => r.error = Some(e.to_string()),
        },
        SystemKind::Baseline => {
            let shown: BTreeSet<&str> = case.correct.iter().map(String::as_str).collect();
            let truth: Vec<String> =
                case.truth.iter().filter(|t| shown.contains(EvalCase::item_contract(t))).cloned().collect();
            match answer_baseline(case, kb, kb.config().eval.baseline_context_tokens) {
                BaselineAnswer::Items(got) => {
                    r.score = Some(recall(&got, &truth));
                    r.missing = missing(&got, &truth);
                }
                BaselineAnswer::Text(t) => r.score = Some(scorer.score(&t, reference)),
                BaselineAnswer::Unsupported => r.score = None,
            }
        }
    }
    r
}

/// Runs every case in parallel against one system. Missing analytical
/// references are computed first. Failing cases score 0.
pub fn run_eval(cases: &[EvalCase], system: SystemKind, engine: &Engine, scorer: &dyn SimilarityScorer) -> Result<EvalRun> {
    let start = Instant::now();
    let kb = engine.snapshot();
    let mut cases = cases.to_vec();
    attach_references(&mut cases, &kb)?;
    let results: Vec<CaseResult> = cases.par_iter().map(|c| score_case(c, system, engine, &kb, scorer)).collect();
    let card = ScoreCard::from_results(system, scorer.name(), &results);
    Ok(EvalRun { card, results, elapsed_ms: start.elapsed().as_millis() as u64 })
}

/// Both systems over one generated corpus.
#[derive(Debug, Clone)]
pub struct SyntheticEval {
    pub manifest: CorpusManifest,
    pub cases: Vec<EvalCase>,
    pub law: EvalRun,
    pub baseline: EvalRun,
}

/// Generates a corpus of `n_contracts`, builds the dataset from its
/// manifest and scores both systems with the mock planner and client.
pub fn evaluate_synthetic(seed: u64, n_contracts: usize, config: &Config) -> Result<SyntheticEval> {
    let generated = generate_corpus_sized(seed, n_contracts, &StyleMix::default());
    let docs = ingest_documents(generated.raw_inputs(), &LexiconLabeler::builtin(config.index.label_threshold));
    let client = build_client(config, &PartyRegistry::from_corpus(&docs))?;
    let kb = KnowledgeBase::build(docs, config.clone(), client)?;
    let engine = Engine::from_config(kb)?;
    let mut cases = build_dataset(&generated.manifest, 20, 10, seed)?;
    attach_references(&mut cases, &engine.snapshot())?;
    let law = run_eval(&cases, SystemKind::Law, &engine, &TokenF1)?;
    let baseline = run_eval(&cases, SystemKind::Baseline, &engine, &TokenF1)?;
    Ok(SyntheticEval { manifest: generated.manifest, cases, law, baseline })
}

impl SyntheticEval {
    pub fn law_mean(&self, task: Task) -> Option<f64> {
        self.law.card.mean(task)
    }
}
