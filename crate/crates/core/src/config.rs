//! Runtime configuration. Every threshold and budget the engine uses lives
//! here with its default; a TOML file can override any subset of keys.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub extraction: ExtractionConfig,
    pub index: IndexConfig,
    pub agents: AgentConfig,
    pub plan: PlanConfig,
    pub fetch: FetchConfig,
    pub eval: EvalConfig,
    /// `"mock"` (template compiler) or `"llm"` (prompted through the client).
    pub planner: String,
    /// `"mock"` (deterministic extractive) or `"http"` (hosted adapter).
    pub client: String,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            extraction: ExtractionConfig::default(),
            index: IndexConfig::default(),
            agents: AgentConfig::default(),
            plan: PlanConfig::default(),
            fetch: FetchConfig::default(),
            eval: EvalConfig::default(),
            planner: "mock".into(),
            client: "mock".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    pub party_threshold: f64,
    pub date_cue_window: usize,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            party_threshold: 0.90,
            date_cue_window: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IndexConfig {
    pub label_threshold: f64,
    pub title_weight: f64,
    pub k1: f64,
    pub b: f64,
    pub top_k: usize,
}

impl Default for IndexConfig {
    fn default() -> Self {
        Self {
            label_threshold: 0.15,
            title_weight: 2.0,
            k1: 1.2,
            b: 0.75,
            top_k: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentConfig {
    pub context_limit: usize,
    pub chunk_size: usize,
    pub max_parallel: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            context_limit: 16_000,
            chunk_size: 8_000,
            max_parallel: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanConfig {
    pub max_attempts: usize,
    pub call_budget: usize,
    pub statement_cap: usize,
}

impl Default for PlanConfig {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            call_budget: 1_000,
            statement_cap: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FetchConfig {
    pub rate_limit: f64,
    pub user_agent: String,
    pub max_retries: u32,
    pub backoff_ms: u64,
}

impl Default for FetchConfig {
    fn default() -> Self {
        Self {
            rate_limit: 8.0,
            user_agent: String::new(),
            max_retries: 4,
            backoff_ms: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub baseline_context_tokens: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            baseline_context_tokens: 3_000,
        }
    }
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents.chunk_size == 0 || self.agents.chunk_size >= self.agents.context_limit {
            return Err(Error::Config(
                "agents.chunk_size must be positive and below agents.context_limit".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.extraction.party_threshold) {
            return Err(Error::Config("extraction.party_threshold must be in [0,1]".into()));
        }
        if self.fetch.rate_limit <= 0.0 || self.fetch.rate_limit > 10.0 {
            return Err(Error::Config("fetch.rate_limit must be in (0, 10]".into()));
        }
        if !matches!(self.planner.as_str(), "mock" | "llm") {
            return Err(Error::Config(format!("unknown planner {:?}", self.planner)));
        }
        if !matches!(self.client.as_str(), "mock" | "http") {
            return Err(Error::Config(format!("unknown client {:?}", self.client)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_toml_overrides_defaults() {
        let cfg = Config::from_toml_str("[index]\ntop_k = 5\n[fetch]\nrate_limit = 4.0\n").unwrap();
        assert_eq!(cfg.index.top_k, 5);
        assert_eq!(cfg.index.title_weight, 2.0);
        assert_eq!(cfg.fetch.rate_limit, 4.0);
        assert_eq!(cfg.agents.chunk_size, 8_000);
    }

    #[test]
    fn rejects_rate_above_ten() {
        let err = Config::from_toml_str("[fetch]\nrate_limit = 12.0\n").unwrap_err();
        assert_eq!(err.code(), "E_CONFIG");
    }
}
