//! Evaluation harness: templated query datasets with manifest-derived
//! truth, the truncated-context baseline, scoring and Table-1 reports.

mod baseline;
mod dataset;
mod report;
mod run;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use baseline::{answer_baseline, BaselineAnswer};
pub use dataset::{attach_references, build_dataset, Combo, COMBOS};
pub use report::{render_csv, render_table, REPORT_HEADER};
pub use run::{evaluate_synthetic, run_eval, EvalRun, SyntheticEval};

use crate::plan::{QuerySpec, SectionRef, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    Retrieval,
    Analytical,
}

/// One templated query with its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalCase {
    pub id: String,
    pub query: QuerySpec,
    pub kind: CaseKind,
    pub combo: String,
    /// Expected items for retrieval cases: contract ids, or `id|value`.
    #[serde(default)]
    pub truth: Vec<String>,
    /// Sections the analytical reference is built from.
    #[serde(default)]
    pub truth_sections: Vec<SectionRef>,
    /// Reference text for analytical cases, filled by [`attach_references`].
    #[serde(default)]
    pub reference: Option<String>,
    /// Relevant contracts shown to the baseline.
    #[serde(default)]
    pub correct: Vec<String>,
    /// Irrelevant contracts shown to the baseline.
    #[serde(default)]
    pub distractors: Vec<String>,
}

impl EvalCase {
    /// The contract an item belongs to.
    pub fn item_contract(item: &str) -> &str {
        item.split_once('|').map_or(item, |(c, _)| c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Law,
    Baseline,
}

impl SystemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemKind::Law => "law",
            SystemKind::Baseline => "baseline",
        }
    }
}

impl std::str::FromStr for SystemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "law" => Ok(SystemKind::Law),
            "baseline" => Ok(SystemKind::Baseline),
            _ => Err(format!("unknown system {s:?} (expected law or baseline)")),
        }
    }
}

/// Text similarity in [0, 1].
pub trait SimilarityScorer: Send + Sync {
    fn name(&self) -> &str;
    fn score(&self, candidate: &str, reference: &str) -> f64;
}

/// F1 over lowercase alphanumeric tokens, counted as multisets.
#[derive(Debug, Clone, Copy, Default)]
pub struct TokenF1;

fn token_counts(text: &str) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for w in text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()) {
        *m.entry(w.to_lowercase()).or_insert(0) += 1;
    }
    m
}

impl SimilarityScorer for TokenF1 {
    fn name(&self) -> &str {
        "token-f1"
    }

    fn score(&self, candidate: &str, reference: &str) -> f64 {
        let (c, r) = (token_counts(candidate), token_counts(reference));
        let (nc, nr): (usize, usize) = (c.values().sum(), r.values().sum());
        if nc == 0 && nr == 0 {
            return 1.0;
        }
        let overlap: usize = c.iter().map(|(w, n)| (*n).min(r.get(w).copied().unwrap_or(0))).sum();
        if overlap == 0 {
            return 0.0;
        }
        let p = overlap as f64 / nc as f64;
        let rec = overlap as f64 / nr as f64;
        2.0 * p * rec / (p + rec)
    }
}

/// Canonical form used to match answer items against truth.
pub fn normalize_item(item: &str) -> String {
    item.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// |retrieved ∩ truth| / |truth| over normalised items. An empty truth
/// scores 1 only when nothing was retrieved.
pub fn recall(retrieved: &[String], truth: &[String]) -> f64 {
    let got: std::collections::BTreeSet<String> = retrieved.iter().map(|s| normalize_item(s)).collect();
    let want: std::collections::BTreeSet<String> = truth.iter().map(|s| normalize_item(s)).collect();
    if want.is_empty() {
        return if got.is_empty() { 1.0 } else { 0.0 };
    }
    want.intersection(&got).count() as f64 / want.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    HitRate,
    SimilarityF1,
}

/// Outcome of one case. `score` is `None` when the system does not attempt
/// the task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case_id: String,
    pub task: Task,
    pub combo: String,
    pub metric: Metric,
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub metric: Metric,
    pub cases: usize,
    pub scored: usize,
    pub total: f64,
    pub errors: usize,
}

impl TaskScore {
    pub fn mean(&self) -> Option<f64> {
        (self.scored > 0).then(|| self.total / self.scored as f64)
    }
}

/// Per-task aggregate of case results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub system: SystemKind,
    pub scorer: String,
    pub tasks: BTreeMap<Task, TaskScore>,
}

impl ScoreCard {
    pub fn empty(system: SystemKind, scorer: &str) -> Self {
        Self { system, scorer: scorer.to_string(), tasks: BTreeMap::new() }
    }

    /// Aggregates in case-id order, so the card does not depend on the
    /// order results arrive in.
    pub fn from_results(system: SystemKind, scorer: &str, results: &[CaseResult]) -> Self {
        let mut sorted: Vec<&CaseResult> = results.iter().collect();
        sorted.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        let mut card = Self::empty(system, scorer);
        for r in sorted {
            card.add(r);
        }
        card
    }

    pub fn add(&mut self, r: &CaseResult) {
        let t = self.tasks.entry(r.task).or_insert(TaskScore { metric: r.metric, cases: 0, scored: 0, total: 0.0, errors: 0 });
        t.cases += 1;
        if let Some(s) = r.score {
            t.scored += 1;
            t.total += s;
        }
        if r.error.is_some() {
            t.errors += 1;
        }
    }

    pub fn mean(&self, task: Task) -> Option<f64> {
        self.tasks.get(&task).and_then(TaskScore::mean)
    }

    pub fn total_cases(&self) -> usize {
        self.tasks.values().map(|t| t.cases).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn f1_basics() {
        let f = TokenF1;
        assert_eq!(f.score("the fund pays", "the fund pays"), 1.0);
        assert_eq!(f.score("alpha beta", "gamma delta"), 0.0);
        assert!((f.score("a b c d", "a b") - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(f.score("", ""), 1.0);
        assert_eq!(f.score("a", ""), 0.0);
    }

    #[test]
    fn recall_is_set_based() {
        let t = vec!["a|01/01/2020".to_string(), "b|x".to_string()];
        assert_eq!(recall(&["A|01/01/2020".into()], &t), 0.5);
        assert_eq!(recall(&t, &t), 1.0);
        assert_eq!(recall(&[], &[]), 1.0);
    }

    fn result(i: usize, task: Task, score: f64) -> CaseResult {
        CaseResult { case_id: format!("c{i:03}"), task, combo: "fund".into(), metric: Metric::HitRate, score: Some(score), missing: vec![], error: None }
    }

    proptest! {
        #[test]
        fn f1_symmetric(a in "[a-d ]{0,20}", b in "[a-d ]{0,20}") {
            prop_assert_eq!(TokenF1.score(&a, &b), TokenF1.score(&b, &a));
            prop_assert!((0.0..=1.0).contains(&TokenF1.score(&a, &b)));
            prop_assert_eq!(TokenF1.score(&a, &a), 1.0);
        }

        #[test]
        fn card_ignores_order(scores in proptest::collection::vec(0.0f64..=1.0, 1..40), seed in any::<u64>()) {
            let results: Vec<CaseResult> = scores.iter().enumerate().map(|(i, s)| result(i, Task::ExploreAll, *s)).collect();
            let mut shuffled = results.clone();
            use rand::seq::SliceRandom;
            shuffled.shuffle(&mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed));
            prop_assert_eq!(
                ScoreCard::from_results(SystemKind::Law, "f1", &results),
                ScoreCard::from_results(SystemKind::Law, "f1", &shuffled)
            );
        }
    }
}
