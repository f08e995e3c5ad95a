use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::{chunk_text, client::render_compare_prompt, summarize, LlmClient, TokenBudget};
use crate::error::{Error, Result};
use crate::extraction::{find_date_literals, CalendarDate};
use crate::text::{sentences, similarity};

/// One clause to compare, with the contract it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseInput {
    pub contract_id: String,
    pub effective_date: Option<CalendarDate>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Delta {
    pub left_contract: String,
    pub right_contract: String,
    pub text: String,
}

/// Clauses in chronological order and the comparison of each adjacent
/// pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonChain {
    pub sections: Vec<ClauseInput>,
    pub deltas: Vec<Delta>,
}

impl ComparisonChain {
    /// Narrative rendering: one paragraph per delta.
    pub fn render(&self) -> String {
        self.deltas
            .iter()
            .map(|d| format!("{} -> {}:\n{}", d.left_contract, d.right_contract, d.text))
            .collect::<Vec<_>>()
            .join("\n\n")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiteralChange {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangedSentence {
    pub left: String,
    pub right: String,
    pub literals: Vec<LiteralChange>,
}

/// Sentence-level difference between two clause versions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceDiff {
    pub removed: Vec<String>,
    pub added: Vec<String>,
    pub changed: Vec<ChangedSentence>,
}

impl SentenceDiff {
    pub fn is_empty(&self) -> bool {
        self.removed.is_empty() && self.added.is_empty() && self.changed.is_empty()
    }
}

static NUMBER_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\$\s?\d[\d,]*(?:\.\d+)?|\d[\d,]*(?:\.\d+)?%|\b\d[\d,]*(?:\.\d+)?\b").unwrap());

/// Amounts, percentages, numbers and date literals, in order.
fn literals(s: &str) -> Vec<String> {
    let dates = find_date_literals(s);
    let mut out: Vec<(usize, String)> = dates.iter().map(|d| (d.start, s[d.start..d.end].to_string())).collect();
    for m in NUMBER_RE.find_iter(s) {
        if !dates.iter().any(|d| m.start() < d.end && d.start < m.end()) {
            out.push((m.start(), m.as_str().to_string()));
        }
    }
    out.sort();
    out.into_iter().map(|(_, t)| t).collect()
}

fn masked(s: &str) -> String {
    NUMBER_RE.replace_all(s, "#").into_owned()
}

fn norm(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Sentences only in `left`, only in `right`, and pairs of sentences that
/// differ only slightly, with their changed literals.
pub fn sentence_diff(left: &str, right: &str) -> SentenceDiff {
    let l: Vec<String> = sentences(left).into_iter().map(norm).collect();
    let r: Vec<String> = sentences(right).into_iter().map(norm).collect();
    let lset: BTreeSet<&str> = l.iter().map(String::as_str).collect();
    let rset: BTreeSet<&str> = r.iter().map(String::as_str).collect();
    let mut only_l: Vec<&String> = l.iter().filter(|s| !rset.contains(s.as_str())).collect();
    let mut only_r: Vec<&String> = r.iter().filter(|s| !lset.contains(s.as_str())).collect();
    only_l.dedup();
    only_r.dedup();
    let mut diff = SentenceDiff::default();
    let mut used = vec![false; only_r.len()];
    for ls in only_l {
        let lm = masked(ls);
        let best = only_r
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, rs)| (j, similarity(&lm, &masked(rs))))
            .filter(|(_, sim)| *sim >= 0.6)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        match best {
            Some((j, _)) => {
                used[j] = true;
                let (a, b) = (literals(ls), literals(only_r[j]));
                let n = a.len().max(b.len());
                let changes = (0..n)
                    .filter_map(|i| {
                        let from = a.get(i).cloned().unwrap_or_default();
                        let to = b.get(i).cloned().unwrap_or_default();
                        (from != to).then_some(LiteralChange { from, to })
                    })
                    .collect();
                diff.changed.push(ChangedSentence { left: ls.clone(), right: only_r[j].clone(), literals: changes });
            }
            None => diff.removed.push(ls.clone()),
        }
    }
    diff.added = only_r.iter().zip(&used).filter(|(_, u)| !**u).map(|(s, _)| (*s).clone()).collect();
    diff
}

pub(crate) fn render_diff(diff: &SentenceDiff) -> String {
    if diff.is_empty() {
        return "no substantive change".into();
    }
    let mut lines = Vec::new();
    for c in &diff.changed {
        let lits = c.literals.iter().map(|l| format!("{} -> {}", l.from, l.to)).collect::<Vec<_>>().join("; ");
        if lits.is_empty() {
            lines.push(format!("changed: {}", c.right));
        } else {
            lines.push(format!("changed [{lits}]: {}", c.right));
        }
    }
    lines.extend(diff.removed.iter().map(|s| format!("removed: {s}")));
    lines.extend(diff.added.iter().map(|s| format!("added: {s}")));
    lines.join("\n")
}

/// Repeatedly summarises `text` until it fits one chunk; hard-truncates if
/// summarising stops shrinking it.
fn fit(text: &str, budget: &TokenBudget, client: &dyn LlmClient) -> Result<String> {
    let mut current = text.to_string();
    for _ in 0..4 {
        let n = budget.count(&current);
        if n <= budget.chunk_size {
            return Ok(current);
        }
        let next = summarize(&[&current], budget, client, 8)?;
        if budget.count(&next) >= n {
            break;
        }
        current = next;
    }
    if budget.count(&current) <= budget.chunk_size {
        return Ok(current);
    }
    Ok(chunk_text(&current, budget).into_iter().next().unwrap_or_default())
}

/// Sorts clauses by effective date (then contract id) and compares each
/// adjacent pair.
pub fn compare_clauses(mut inputs: Vec<ClauseInput>, budget: &TokenBudget, client: &dyn LlmClient) -> Result<ComparisonChain> {
    inputs.sort_by(|a, b| {
        let key = |c: &ClauseInput| (c.effective_date.is_none(), c.effective_date);
        key(a).cmp(&key(b)).then_with(|| a.contract_id.cmp(&b.contract_id)).then_with(|| a.text.cmp(&b.text))
    });
    let fitted: Vec<String> = inputs.iter().map(|c| fit(&c.text, budget, client)).collect::<Result<_>>()?;
    let mut deltas = Vec::new();
    for (i, pair) in fitted.windows(2).enumerate() {
        let prompt = render_compare_prompt(&pair[0], &pair[1]);
        let text = client.generate(&prompt, 2_048).map_err(|message| Error::LlmFailure { chunk: i, message })?;
        deltas.push(Delta {
            left_contract: inputs[i].contract_id.clone(),
            right_contract: inputs[i + 1].contract_id.clone(),
            text,
        });
    }
    Ok(ComparisonChain { sections: inputs, deltas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::MockClient;

    fn input(id: &str, date: &str, text: &str) -> ClauseInput {
        ClauseInput { contract_id: id.into(), effective_date: Some(date.parse().unwrap()), text: text.into() }
    }

    #[test]
    fn identical_text_no_change() {
        let chain = compare_clauses(
            vec![input("b", "01/01/2010", "Same text here."), input("a", "01/01/2005", "Same text here.")],
            &TokenBudget::default(),
            &MockClient::default(),
        )
        .unwrap();
        assert_eq!(chain.deltas.len(), 1);
        assert_eq!(chain.sections[0].contract_id, "a");
        assert_eq!(chain.deltas[0].text, "no substantive change");
    }

    #[test]
    fn fee_change_is_flagged() {
        let d = sentence_diff("The Fund shall pay a fee of $100 per year.", "The Fund shall pay a fee of $150 per year.");
        assert_eq!(d.changed.len(), 1);
        assert_eq!(d.changed[0].literals, vec![LiteralChange { from: "$100".into(), to: "$150".into() }]);
        assert!(render_diff(&d).contains("$100 -> $150"));
    }

    #[test]
    fn added_and_removed() {
        let d = sentence_diff("Keep this. Drop that old clause entirely.", "Keep this. A brand new obligation appears now.");
        assert_eq!(d.removed, vec!["Drop that old clause entirely."]);
        assert_eq!(d.added, vec!["A brand new obligation appears now."]);
    }

    #[test]
    fn single_section_has_no_deltas() {
        let chain = compare_clauses(vec![input("a", "01/01/2005", "x.")], &TokenBudget::default(), &MockClient::default()).unwrap();
        assert!(chain.deltas.is_empty());
    }

    #[test]
    fn oversized_sections_are_summarised_first() {
        let budget = TokenBudget::new(200, 60).unwrap();
        let long = format!("The fee is $100 as of June 1, 2005. {}", "Filler sentence without content. ".repeat(30));
        let chain = compare_clauses(vec![input("a", "01/01/2005", &long), input("b", "01/01/2006", &long.replace("$100", "$120"))], &budget, &MockClient::default()).unwrap();
        assert!(chain.deltas[0].text.contains("$100 -> $120"), "{}", chain.deltas[0].text);
    }
}
