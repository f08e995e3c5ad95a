use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors surfaced by the library. Every variant maps onto a stable
/// machine-readable code (see [`Error::code`]) used by the CLI and the HTTP
/// problem-detail envelopes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no date literal found in contract {0}")]
    NoDate(String),
    #[error("contract {0} has no effective date")]
    NoEffective(String),
    #[error("could not resolve a unique master agreement for {0}")]
    UnresolvedMaster(String),
    #[error("throttled fetching {uri} after {attempts} attempts")]
    Throttled { uri: String, attempts: u32 },
    #[error("network error fetching {uri}: {message}")]
    Network { uri: String, message: String },
    #[error("LLM call failed on chunk {chunk}: {message}")]
    LlmFailure { chunk: usize, message: String },
    #[error("planning failed after {attempts} attempts")]
    Exhausted { attempts: usize },
    #[error("no contract matches the requested entities: {0}")]
    UnknownEntity(String),
    #[error("corpus cannot supply {0}")]
    InsufficientCorpus(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("malformed data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::NoDate(_) => "E_NO_DATE",
            Error::NoEffective(_) => "E_NO_EFFECTIVE",
            Error::UnresolvedMaster(_) => "E_UNRESOLVED_MASTER",
            Error::Throttled { .. } => "E_THROTTLED",
            Error::Network { .. } => "E_NETWORK",
            Error::LlmFailure { .. } => "E_LLM_FAILURE",
            Error::Exhausted { .. } => "E_EXHAUSTED",
            Error::UnknownEntity(_) => "E_UNKNOWN_ENTITY",
            Error::InsufficientCorpus(_) => "E_INSUFFICIENT_CORPUS",
            Error::InvalidQuery(_) => "E_INVALID_QUERY",
            Error::Config(_) => "E_CONFIG",
            Error::NotFound(_) => "E_NOT_FOUND",
            Error::Format(_) => "E_FORMAT",
            Error::Io(_) => "E_IO",
            Error::Json(_) => "E_FORMAT",
            Error::Csv(_) => "E_FORMAT",
        }
    }

    pub fn to_problem(&self) -> ProblemDetail {
        let locus = match self {
            Error::LlmFailure { chunk, .. } => Some(format!("chunk {chunk}")),
            Error::Throttled { uri, .. } | Error::Network { uri, .. } => Some(uri.clone()),
            Error::NoDate(id) | Error::NoEffective(id) | Error::UnresolvedMaster(id) => {
                Some(id.clone())
            }
            _ => None,
        };
        ProblemDetail {
            code: self.code().to_string(),
            message: self.to_string(),
            locus,
        }
    }
}

/// Problem-detail envelope shared by the CLI `--json` output and the HTTP API.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemDetail {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locus: Option<String>,
}
