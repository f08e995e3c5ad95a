//! LLM clients: the deterministic extractive mock and an optional hosted
//! adapter speaking the common chat-completions protocol.

use std::time::Duration as StdDuration;

use crate::extraction::{find_date_literals, normalize_name};
use crate::multihop::find_duration;
use crate::text::sentences;

use super::compare::{render_diff, sentence_diff};

pub const SUMMARIZE_PROMPT: &str = include_str!("../../data/prompts/summarize_v1.txt");
pub const COMPARE_PROMPT: &str = include_str!("../../data/prompts/compare_v1.txt");

const SECTION_OPEN: &str = "<section>\n";
const SECTION_CLOSE: &str = "\n</section>";

/// A text-generation backend. Implementations must tolerate concurrent
/// calls.
pub trait LlmClient: Send + Sync {
    fn name(&self) -> &str;
    fn generate(&self, prompt: &str, max_output: usize) -> Result<String, String>;
}

impl<T: LlmClient + ?Sized> LlmClient for std::sync::Arc<T> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn generate(&self, prompt: &str, max_output: usize) -> Result<String, String> {
        (**self).generate(prompt, max_output)
    }
}

pub fn render_summarize_prompt(inputs: &[&str]) -> String {
    let sections = inputs
        .iter()
        .map(|s| format!("{SECTION_OPEN}{s}{SECTION_CLOSE}"))
        .collect::<Vec<_>>()
        .join("\n");
    SUMMARIZE_PROMPT.replace("{sections}", &sections)
}

pub fn render_compare_prompt(left: &str, right: &str) -> String {
    COMPARE_PROMPT.replace("{left}", left).replace("{right}", right)
}

fn between<'a>(s: &'a str, open: &str, close: &str) -> Option<&'a str> {
    let start = s.find(open)? + open.len();
    let end = s[start..].rfind(close)? + start;
    Some(&s[start..end])
}

/// Deterministic stand-in for a hosted model.
///
/// Summaries are extractive: the first sentence of each input plus every
/// sentence mentioning a known party, a date literal or a duration.
/// Comparisons are sentence-level set differences.
#[derive(Debug, Clone, Default)]
pub struct MockClient {
    parties: Vec<Vec<String>>,
}

fn words(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).map(str::to_lowercase).collect()
}

impl MockClient {
    pub fn new(party_names: impl IntoIterator<Item = String>) -> Self {
        let mut parties: Vec<Vec<String>> = party_names
            .into_iter()
            .map(|n| words(&normalize_name(&n)))
            .filter(|w| !w.is_empty())
            .collect();
        parties.sort();
        parties.dedup();
        Self { parties }
    }

    fn mentions_party(&self, sentence: &str) -> bool {
        let w = words(sentence);
        self.parties.iter().any(|p| w.windows(p.len()).any(|win| win == p.as_slice()))
    }

    /// Extractive summary of one input.
    pub fn extract(&self, input: &str) -> String {
        let literals = find_date_literals(input);
        let base = input.as_ptr() as usize;
        let mut kept = Vec::new();
        for (i, s) in sentences(input).into_iter().enumerate() {
            let start = s.as_ptr() as usize - base;
            let end = start + s.len();
            let has_date = literals.iter().any(|l| l.start < end && start < l.end);
            if i == 0 || has_date || find_duration(s).is_some() || self.mentions_party(s) {
                kept.push(s);
            }
        }
        kept.join(" ")
    }

    fn summarize_prompt(&self, prompt: &str) -> String {
        let mut outputs = Vec::new();
        let mut rest = prompt;
        while let Some(open) = rest.find(SECTION_OPEN) {
            let body_start = open + SECTION_OPEN.len();
            let Some(close) = rest[body_start..].find(SECTION_CLOSE) else { break };
            let summary = self.extract(&rest[body_start..body_start + close]);
            if !summary.is_empty() {
                outputs.push(summary);
            }
            rest = &rest[body_start + close + SECTION_CLOSE.len()..];
        }
        outputs.join("\n\n")
    }
}

impl LlmClient for MockClient {
    fn name(&self) -> &str {
        "mock-extractive"
    }

    fn generate(&self, prompt: &str, _max_output: usize) -> Result<String, String> {
        if prompt.starts_with("[task:summarize") {
            Ok(self.summarize_prompt(prompt))
        } else if prompt.starts_with("[task:compare") {
            let left = between(prompt, "<left>\n", "\n</left>").ok_or("compare prompt without <left>")?;
            let right = between(prompt, "<right>\n", "\n</right>").ok_or("compare prompt without <right>")?;
            Ok(render_diff(&sentence_diff(left, right)))
        } else {
            Err("mock client: unrecognised prompt".into())
        }
    }
}

/// Hosted model adapter configured from `LEXFLOW_LLM_ENDPOINT`,
/// `LEXFLOW_LLM_API_KEY` and `LEXFLOW_LLM_MODEL`.
pub struct HttpLlmClient {
    endpoint: String,
    api_key: String,
    model: String,
    agent: ureq::Agent,
}

impl HttpLlmClient {
    pub fn new(endpoint: impl Into<String>, api_key: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            api_key: api_key.into(),
            model: model.into(),
            agent: ureq::AgentBuilder::new().timeout(StdDuration::from_secs(120)).build(),
        }
    }

    pub fn from_env() -> Option<Self> {
        let endpoint = std::env::var("LEXFLOW_LLM_ENDPOINT").ok()?;
        let api_key = std::env::var("LEXFLOW_LLM_API_KEY").unwrap_or_default();
        let model = std::env::var("LEXFLOW_LLM_MODEL").unwrap_or_else(|_| "default".into());
        Some(Self::new(endpoint, api_key, model))
    }
}

impl LlmClient for HttpLlmClient {
    fn name(&self) -> &str {
        &self.model
    }

    fn generate(&self, prompt: &str, max_output: usize) -> Result<String, String> {
        let body = serde_json::json!({
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "max_tokens": max_output,
            "temperature": 0,
        });
        log::debug!("llm request to {}: {} prompt bytes", self.endpoint, prompt.len());
        let mut req = self.agent.post(&self.endpoint).set("Content-Type", "application/json");
        if !self.api_key.is_empty() {
            req = req.set("Authorization", &format!("Bearer {}", self.api_key));
        }
        let raw = req
            .send_string(&body.to_string())
            .map_err(|e| e.to_string())?
            .into_string()
            .map_err(|e| e.to_string())?;
        let resp: serde_json::Value = serde_json::from_str(&raw).map_err(|e| e.to_string())?;
        let text = resp["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| format!("unexpected response shape: {resp}"))?
            .to_string();
        log::debug!("llm response: {} bytes", text.len());
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mock_keeps_date_sentence_verbatim() {
        let s = "Fund A shall pay Custodian B $100 annually, effective 01/01/2020.";
        let out = MockClient::default().generate(&render_summarize_prompt(&[s]), 500).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn mock_keeps_first_party_and_duration_sentences() {
        let text = "Intro sentence here. Nothing to see. The Alpha Fund pays fees. Boring again. The term is three (3) years.";
        let client = MockClient::new(["Alpha Fund".to_string()]);
        assert_eq!(client.extract(text), "Intro sentence here. The Alpha Fund pays fees. The term is three (3) years.");
    }

    #[test]
    fn mock_is_deterministic_and_rejects_unknown_prompts() {
        let c = MockClient::default();
        let p = render_summarize_prompt(&["Alpha one. Beta two.", "Gamma three."]);
        assert_eq!(c.generate(&p, 10), c.generate(&p, 10));
        assert_eq!(c.generate(&p, 10).unwrap(), "Alpha one.\n\nGamma three.");
        assert!(c.generate("hello", 10).is_err());
    }
}
