use std::sync::LazyLock;

use regex::Regex;

use super::EvalCase;
use crate::agents::{summarize, truncate_tokens};
use crate::extraction::find_date_literals;
use crate::orchestrator::KnowledgeBase;
use crate::plan::Task;

/// What the baseline produced for one case.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselineAnswer {
    Items(Vec<String>),
    Text(String),
    /// The baseline has no way to attempt the task.
    Unsupported,
}

static TERMINATION_CUE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\b(?:terminat\w*|expir\w*|term)\b").unwrap());

const CUE_WINDOW: usize = 200;

fn title(text: &str) -> &str {
    text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("")
}

fn contains_ci(haystack: &str, needle: &str) -> bool {
    haystack.to_lowercase().contains(&needle.to_lowercase())
}

/// The visible text of each contract when the contracts share one context
/// of `limit` tokens, filled in order.
fn shared_context<'a>(kb: &'a KnowledgeBase, ids: &'a [String], limit: usize) -> Vec<(&'a str, &'a str)> {
    let mut left = limit;
    let mut out = Vec::new();
    for id in ids {
        let Some(doc) = kb.doc(id) else { continue };
        let visible = truncate_tokens(&doc.plain_text, left, kb.budget());
        left -= kb.budget().count(visible).min(left);
        out.push((id.as_str(), visible));
    }
    out
}

fn floor_char(text: &str, mut i: usize) -> usize {
    while !text.is_char_boundary(i) {
        i -= 1;
    }
    i
}

/// A single-pass reader over context truncated to `context_tokens`.
///
/// Explore and master questions are asked as one True/False question per
/// shown contract, each with its own truncated context. Date and party
/// questions read all shown relevant contracts in one shared context. It
/// answers with the first plausible date literal and never says a contract
/// is evergreen.
pub fn answer_baseline(case: &EvalCase, kb: &KnowledgeBase, context_tokens: usize) -> BaselineAnswer {
    let names: Vec<&str> = case.query.entities.populated().iter().map(|(_, _, n)| *n).collect();
    let judge = |master: bool| {
        let items = case
            .correct
            .iter()
            .chain(&case.distractors)
            .filter(|id| {
                let Some(doc) = kb.doc(id) else { return false };
                let text = truncate_tokens(&doc.plain_text, context_tokens, kb.budget());
                names.iter().all(|n| contains_ci(text, n)) && !(master && contains_ci(title(text), "amendment"))
            })
            .cloned()
            .collect();
        BaselineAnswer::Items(items)
    };
    match case.query.task {
        Task::ExploreAll => judge(false),
        Task::FindMasterAgreements => judge(true),
        Task::FindMasterDates => BaselineAnswer::Items(
            shared_context(kb, &case.correct, context_tokens)
                .into_iter()
                .filter_map(|(id, text)| {
                    let d = find_date_literals(text).into_iter().find_map(|l| l.date)?;
                    Some(format!("{id}|{d}"))
                })
                .collect(),
        ),
        Task::FindTerminationDates => BaselineAnswer::Items(
            shared_context(kb, &case.correct, context_tokens)
                .into_iter()
                .filter_map(|(id, text)| {
                    let d = find_date_literals(text).into_iter().find_map(|l| {
                        let from = floor_char(text, l.start.saturating_sub(CUE_WINDOW));
                        TERMINATION_CUE.is_match(&text[from..l.start]).then_some(l.date).flatten()
                    })?;
                    Some(format!("{id}|{d}"))
                })
                .collect(),
        ),
        Task::FindParties => BaselineAnswer::Items(
            shared_context(kb, &case.correct, context_tokens)
                .into_iter()
                .flat_map(|(id, text)| names.iter().filter(|n| contains_ci(text, n)).map(move |n| format!("{id}|{n}")))
                .collect(),
        ),
        Task::SummarizeClause => {
            let texts: Vec<&str> = shared_context(kb, &case.correct, context_tokens).into_iter().map(|(_, t)| t).collect();
            match summarize(&texts, kb.budget(), kb.client().as_ref(), 1) {
                Ok(s) => BaselineAnswer::Text(s),
                Err(_) => BaselineAnswer::Text(String::new()),
            }
        }
        Task::CompareClause | Task::FindClause => BaselineAnswer::Unsupported,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn title_is_first_nonempty_line() {
        assert_eq!(title("\n\n  AMENDMENT NO. 1\nbody"), "AMENDMENT NO. 1");
    }

    #[test]
    fn termination_cue_matches_words_only() {
        assert!(TERMINATION_CUE.is_match("shall terminate on"));
        assert!(TERMINATION_CUE.is_match("the Term of this"));
        assert!(!TERMINATION_CUE.is_match("determined by"));
    }
}
