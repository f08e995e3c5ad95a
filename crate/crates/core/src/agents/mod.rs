//! Text agents: token budgeting, chunking, map-reduce summaries and
//! chronological clause comparison over a pluggable [`LlmClient`].

mod client;
mod compare;
mod summarize;

use std::fmt;
use std::sync::Arc;

pub use client::{render_compare_prompt, render_summarize_prompt, HttpLlmClient, LlmClient, MockClient, COMPARE_PROMPT, SUMMARIZE_PROMPT};
pub use compare::{compare_clauses, sentence_diff, ClauseInput, ComparisonChain, Delta, LiteralChange, SentenceDiff};
pub use summarize::summarize;

use crate::error::{Error, Result};

/// Counts tokens. Implementations must be subadditive under
/// concatenation (`count(a + b) <= count(a) + count(b)`), which chunking
/// relies on.
pub trait Tokenizer: Send + Sync {
    fn count(&self, text: &str) -> usize;
}

/// Maximal alphanumeric runs plus every other non-whitespace character.
#[derive(Debug, Clone, Copy, Default)]
pub struct AlnumTokenizer;

impl Tokenizer for AlnumTokenizer {
    fn count(&self, text: &str) -> usize {
        let mut n = 0;
        let mut in_run = false;
        for c in text.chars() {
            if c.is_alphanumeric() {
                if !in_run {
                    n += 1;
                    in_run = true;
                }
            } else {
                in_run = false;
                if !c.is_whitespace() {
                    n += 1;
                }
            }
        }
        n
    }
}

#[derive(Clone)]
pub struct TokenBudget {
    pub context_limit: usize,
    pub chunk_size: usize,
    pub tokenizer: Arc<dyn Tokenizer>,
}

impl fmt::Debug for TokenBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TokenBudget")
            .field("context_limit", &self.context_limit)
            .field("chunk_size", &self.chunk_size)
            .finish_non_exhaustive()
    }
}

impl Default for TokenBudget {
    fn default() -> Self {
        Self { context_limit: 16_000, chunk_size: 8_000, tokenizer: Arc::new(AlnumTokenizer) }
    }
}

impl TokenBudget {
    pub fn new(context_limit: usize, chunk_size: usize) -> Result<Self> {
        if chunk_size == 0 || chunk_size >= context_limit {
            return Err(Error::Config(format!(
                "chunk_size ({chunk_size}) must be positive and below context_limit ({context_limit})"
            )));
        }
        Ok(Self { context_limit, chunk_size, ..Self::default() })
    }

    pub fn with_tokenizer(mut self, tokenizer: Arc<dyn Tokenizer>) -> Self {
        self.tokenizer = tokenizer;
        self
    }

    pub fn count(&self, text: &str) -> usize {
        self.tokenizer.count(text)
    }
}

/// Splits `text` into pieces ending just after a separator matched by
/// `boundary`, so that the pieces concatenate back to `text`.
fn split_keep<'a>(text: &'a str, boundary: impl Fn(&str, usize) -> Option<usize>) -> Vec<&'a str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < text.len() {
        if let Some(end) = boundary(text, i) {
            if end > i {
                out.push(&text[start..end]);
                start = end;
                i = end;
                continue;
            }
        }
        i += text[i..].chars().next().map_or(1, char::len_utf8);
    }
    if start < text.len() {
        out.push(&text[start..]);
    }
    out
}

fn paragraph_pieces(text: &str) -> Vec<&str> {
    split_keep(text, |t, i| {
        let rest = &t[i..];
        if !rest.starts_with("\n\n") {
            return None;
        }
        Some(i + rest.len() - rest.trim_start_matches('\n').len())
    })
}

fn sentence_pieces(text: &str) -> Vec<&str> {
    split_keep(text, |t, i| {
        let rest = &t[i..];
        let first = rest.chars().next()?;
        if !matches!(first, '.' | '!' | '?') {
            return None;
        }
        let after = &rest[1..];
        let ws = after.len() - after.trim_start().len();
        (ws > 0).then_some(i + 1 + ws)
    })
}

/// Longest prefix (at a char boundary, at least one char) whose token count
/// fits `limit`.
fn fitting_prefix(text: &str, limit: usize, budget: &TokenBudget) -> usize {
    let bounds: Vec<usize> = text.char_indices().map(|(i, _)| i).skip(1).chain([text.len()]).collect();
    let (mut lo, mut hi) = (0usize, bounds.len() - 1);
    if budget.count(&text[..bounds[0]]) > limit {
        return bounds[0];
    }
    while lo < hi {
        let mid = (lo + hi + 1) / 2;
        if budget.count(&text[..bounds[mid]]) <= limit {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    bounds[lo]
}

/// The longest prefix of `text` (at a char boundary) within `limit`
/// tokens.
pub fn truncate_tokens<'a>(text: &'a str, limit: usize, budget: &TokenBudget) -> &'a str {
    if text.is_empty() || budget.count(text) <= limit {
        return text;
    }
    let cut = fitting_prefix(text, limit, budget);
    if budget.count(&text[..cut]) > limit {
        ""
    } else {
        &text[..cut]
    }
}

fn hard_split<'a>(text: &'a str, budget: &TokenBudget, out: &mut Vec<&'a str>) {
    let mut rest = text;
    while !rest.is_empty() {
        if budget.count(rest) <= budget.chunk_size {
            out.push(rest);
            return;
        }
        let cut = fitting_prefix(rest, budget.chunk_size, budget);
        out.push(&rest[..cut]);
        rest = &rest[cut..];
    }
}

/// Splits `text` into chunks of at most `chunk_size` tokens, packing whole
/// paragraphs where possible, then sentences, then hard splits. The chunks
/// concatenate back to `text` exactly.
pub fn chunk_text(text: &str, budget: &TokenBudget) -> Vec<String> {
    if text.is_empty() {
        return Vec::new();
    }
    let mut units: Vec<&str> = Vec::new();
    for para in paragraph_pieces(text) {
        if budget.count(para) <= budget.chunk_size {
            units.push(para);
            continue;
        }
        for sentence in sentence_pieces(para) {
            if budget.count(sentence) <= budget.chunk_size {
                units.push(sentence);
            } else {
                hard_split(sentence, budget, &mut units);
            }
        }
    }
    let mut chunks = Vec::new();
    let mut current = String::new();
    let mut current_tokens = 0;
    for unit in units {
        let n = budget.count(unit);
        if !current.is_empty() && current_tokens + n > budget.chunk_size {
            chunks.push(std::mem::take(&mut current));
            current_tokens = 0;
        }
        current.push_str(unit);
        current_tokens += n;
    }
    if !current.is_empty() {
        chunks.push(current);
    }
    chunks
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenizer_counts_runs_and_symbols() {
        assert_eq!(AlnumTokenizer.count("Fund A shall pay $100, annually."), 9);
        assert_eq!(AlnumTokenizer.count(""), 0);
        assert_eq!(AlnumTokenizer.count("  \n"), 0);
    }

    #[test]
    fn budget_validation() {
        assert!(TokenBudget::new(16_000, 8_000).is_ok());
        assert_eq!(TokenBudget::new(100, 100).unwrap_err().code(), "E_CONFIG");
    }

    #[test]
    fn small_text_single_chunk() {
        let text = "word ".repeat(100);
        assert_eq!(chunk_text(&text, &TokenBudget::default()), vec![text.clone()]);
    }

    #[test]
    fn paragraphs_pack_to_three_chunks() {
        let para = "w ".repeat(999) + "w";
        let text = vec![para; 20].join("\n\n");
        let budget = TokenBudget::default();
        assert_eq!(budget.count(&text), 20_000);
        let chunks = chunk_text(&text, &budget);
        assert_eq!(chunks.len(), 3);
        assert!(chunks.iter().all(|c| budget.count(c) <= 8_000));
        assert_eq!(chunks.concat(), text);
    }

    #[test]
    fn oversized_sentence_is_hard_split() {
        let budget = TokenBudget::new(20, 5).unwrap();
        let text = "one two three four five six seven eight nine ten eleven";
        let chunks = chunk_text(text, &budget);
        assert_eq!(chunks.concat(), text);
        assert!(chunks.iter().all(|c| budget.count(c) <= 5));
    }

    #[test]
    fn truncation_respects_limit() {
        let b = TokenBudget::default();
        assert_eq!(truncate_tokens("a b c d", 2, &b), "a b ");
        assert_eq!(truncate_tokens("a b", 5, &b), "a b");
        assert_eq!(truncate_tokens("a b", 0, &b), "");
    }

    proptest! {
        #[test]
        fn join_reproduces_input(text in "([a-z]{1,8}[ .,\n]{1,3}){0,80}", chunk in 1usize..30) {
            let budget = TokenBudget::new(chunk + 1, chunk).unwrap();
            let chunks = chunk_text(&text, &budget);
            prop_assert_eq!(chunks.concat(), text);
            for c in &chunks {
                prop_assert!(budget.count(c) <= chunk);
            }
        }
    }
}
