use rayon::prelude::*;

use super::{chunk_text, client::render_summarize_prompt, LlmClient, TokenBudget};
use crate::error::{Error, Result};

const MAX_OUTPUT: usize = 4_096;

fn call(client: &dyn LlmClient, inputs: &[&str], budget: &TokenBudget, chunk: usize) -> Result<String> {
    let prompt = render_summarize_prompt(inputs);
    let room = budget.context_limit.saturating_sub(budget.count(&prompt)).clamp(1, MAX_OUTPUT);
    client.generate(&prompt, room).map_err(|message| Error::LlmFailure { chunk, message })
}

/// Summarises sections. Input that fits the context window goes out in one
/// call; otherwise the joined text is chunked and each chunk is summarised
/// by its own call (at most `max_parallel` at a time), with the partial
/// summaries concatenated in chunk order.
pub fn summarize(section_texts: &[&str], budget: &TokenBudget, client: &dyn LlmClient, max_parallel: usize) -> Result<String> {
    let texts: Vec<&str> = section_texts.iter().copied().filter(|t| !t.trim().is_empty()).collect();
    if texts.is_empty() {
        return Ok(String::new());
    }
    if budget.count(&render_summarize_prompt(&texts)) <= budget.context_limit {
        return call(client, &texts, budget, 0);
    }
    let chunks = chunk_text(&texts.join("\n\n"), budget);
    let workers = chunks.len().min(max_parallel.max(1));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let parts: Vec<String> = pool.install(|| {
        chunks
            .par_iter()
            .enumerate()
            .map(|(i, c)| call(client, &[c.as_str()], budget, i))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(parts.into_iter().filter(|p| !p.is_empty()).collect::<Vec<_>>().join("\n\n"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::MockClient;

    struct Failing;
    impl LlmClient for Failing {
        fn name(&self) -> &str {
            "failing"
        }
        fn generate(&self, prompt: &str, _: usize) -> std::result::Result<String, String> {
            if prompt.contains("poison") { Err("boom".into()) } else { Ok("ok".into()) }
        }
    }

    #[test]
    fn empty_input() {
        assert_eq!(summarize(&[], &TokenBudget::default(), &MockClient::default(), 8).unwrap(), "");
    }

    #[test]
    fn chunked_equals_per_chunk_outputs() {
        let budget = TokenBudget::new(100, 60).unwrap();
        let para = "This paragraph opens the chunk. Filler words follow here without anything notable at all. More filler text continues for a while longer.";
        let dated = "The fee changed on June 1, 2005 for all accounts.";
        let text = [para, dated, para, para, dated, para, para].join("\n\n");
        let client = MockClient::default();
        let chunks = chunk_text(&text, &budget);
        assert!(chunks.len() >= 3);
        assert!(budget.count(&render_summarize_prompt(&[&text])) > budget.context_limit);
        let expected: Vec<String> = chunks.iter().map(|c| client.extract(c)).filter(|s| !s.is_empty()).collect();
        assert_eq!(summarize(&[&text], &budget, &client, 8).unwrap(), expected.join("\n\n"));
    }

    #[test]
    fn failure_reports_chunk_index() {
        let budget = TokenBudget::new(120, 50).unwrap();
        let filler = "word ".repeat(40);
        let text = format!("{filler}\n\n{filler}\n\npoison {}", "word ".repeat(30));
        let err = summarize(&[&text], &budget, &Failing, 2).unwrap_err();
        assert!(matches!(err, Error::LlmFailure { chunk: 2, .. }), "{err:?}");
        assert_eq!(err.code(), "E_LLM_FAILURE");
    }
}
