//! Rate-limited document fetcher with retry, backoff and a resumable
//! checkpoint.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::store::{read_json, write_atomic, write_json};
use crate::error::{Error, Result};

pub const MAX_RATE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportResponse {
    pub status: u16,
    pub body: String,
}

/// Something that can perform a GET. Errors are connection-level failures;
/// HTTP error statuses come back as responses.
pub trait Transport: Send + Sync {
    fn get(&self, uri: &str, user_agent: &str) -> std::result::Result<TransportResponse, String>;
}

/// Blocking HTTP transport.
pub struct HttpTransport {
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Self {
        Self { agent: ureq::AgentBuilder::new().timeout(timeout).build() }
    }
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(30))
    }
}

impl Transport for HttpTransport {
    fn get(&self, uri: &str, user_agent: &str) -> std::result::Result<TransportResponse, String> {
        let resp = match self.agent.get(uri).set("User-Agent", user_agent).call() {
            Ok(r) => r,
            Err(ureq::Error::Status(_, r)) => r,
            Err(e) => return Err(e.to_string()),
        };
        let status = resp.status();
        let body = resp.into_string().map_err(|e| e.to_string())?;
        Ok(TransportResponse { status, body })
    }
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    /// Requests per second, at most [`MAX_RATE`].
    pub rate_limit: f64,
    pub user_agent: String,
    /// Retries after the first attempt for throttled requests.
    pub max_retries: u32,
    pub backoff: Duration,
    /// Directory receiving fetched documents and the checkpoint file.
    pub out_dir: Option<PathBuf>,
}

impl Default for FetchOptions {
    fn default() -> Self {
        Self {
            rate_limit: 8.0,
            user_agent: String::new(),
            max_retries: 4,
            backoff: Duration::from_millis(500),
            out_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDocument {
    pub uri: String,
    pub contract_id: String,
    pub body: String,
    /// Requests spent on this document; 0 when restored from a checkpoint.
    pub attempts: u32,
}

#[derive(Debug, Clone, Default)]
pub struct FetchOutcome {
    pub documents: Vec<RawDocument>,
    pub requests: usize,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct Checkpoint {
    done: BTreeSet<String>,
}

struct TokenBucket {
    rate: f64,
    tokens: f64,
    last: Instant,
}

impl TokenBucket {
    fn new(rate: f64) -> Self {
        Self { rate, tokens: 1.0, last: Instant::now() }
    }

    fn acquire(&mut self) {
        loop {
            let now = Instant::now();
            self.tokens = (self.tokens + now.duration_since(self.last).as_secs_f64() * self.rate).min(1.0);
            self.last = now;
            if self.tokens >= 1.0 {
                self.tokens -= 1.0;
                return;
            }
            thread::sleep(Duration::from_secs_f64((1.0 - self.tokens) / self.rate));
        }
    }
}

/// Stable contract id for a fetched URI: the sanitised last path segment
/// plus a short digest of the full URI.
pub fn contract_id_for(uri: &str) -> String {
    let stem = uri
        .trim_end_matches('/')
        .rsplit('/')
        .next()
        .unwrap_or("")
        .split('.')
        .next()
        .unwrap_or("");
    let clean: String = stem.chars().filter(|c| c.is_ascii_alphanumeric() || *c == '-').take(40).collect();
    let digest = hex::encode(&Sha256::digest(uri.as_bytes())[..4]);
    if clean.is_empty() { format!("doc-{digest}") } else { format!("{clean}-{digest}") }
}

fn is_throttle(status: u16) -> bool {
    status == 429 || status == 503
}

/// Fetches `uris` with token-bucket pacing. Throttling responses are retried
/// with exponential backoff. When `out_dir` is set, each document is written
/// there as it arrives and a checkpoint records finished URIs, so a failed
/// run can be resumed.
pub fn fetch_remote(uris: &[String], transport: &dyn Transport, opts: &FetchOptions) -> Result<FetchOutcome> {
    if !(opts.rate_limit > 0.0 && opts.rate_limit <= MAX_RATE) {
        return Err(Error::Config(format!("rate_limit must be in (0, {MAX_RATE}], got {}", opts.rate_limit)));
    }
    if opts.user_agent.trim().is_empty() {
        return Err(Error::Config("a User-Agent identifying the client is required".into()));
    }
    let mut outcome = FetchOutcome::default();
    if uris.is_empty() {
        return Ok(outcome);
    }
    let checkpoint_path = opts.out_dir.as_ref().map(|d| d.join("fetch_checkpoint.json"));
    let mut checkpoint: Checkpoint = match &checkpoint_path {
        Some(p) if p.exists() => read_json(p)?,
        _ => Checkpoint::default(),
    };
    let mut bucket = TokenBucket::new(opts.rate_limit);
    for uri in uris {
        let contract_id = contract_id_for(uri);
        if checkpoint.done.contains(uri) {
            if let Some(dir) = &opts.out_dir {
                let body = fs::read_to_string(dir.join(format!("{contract_id}.htm")))?;
                outcome.documents.push(RawDocument { uri: uri.clone(), contract_id, body, attempts: 0 });
                continue;
            }
        }
        let mut attempts = 0u32;
        let body = loop {
            bucket.acquire();
            attempts += 1;
            outcome.requests += 1;
            let resp = transport
                .get(uri, &opts.user_agent)
                .map_err(|message| Error::Network { uri: uri.clone(), message })?;
            log::info!("GET {uri} attempt {attempts} -> {}", resp.status);
            if is_throttle(resp.status) {
                if attempts > opts.max_retries {
                    return Err(Error::Throttled { uri: uri.clone(), attempts });
                }
                thread::sleep(opts.backoff * 2u32.saturating_pow(attempts - 1));
                continue;
            }
            if !(200..300).contains(&resp.status) {
                return Err(Error::Network { uri: uri.clone(), message: format!("HTTP status {}", resp.status) });
            }
            break resp.body;
        };
        if let (Some(dir), Some(cp)) = (&opts.out_dir, &checkpoint_path) {
            write_atomic(&dir.join(format!("{contract_id}.htm")), body.as_bytes())?;
            write_json(
                &dir.join(format!("{contract_id}.json")),
                &super::FilingMeta { source_uri: uri.clone(), ..Default::default() },
            )?;
            checkpoint.done.insert(uri.clone());
            write_json(cp, &checkpoint)?;
        }
        outcome.documents.push(RawDocument { uri: uri.clone(), contract_id, body, attempts });
    }
    Ok(outcome)
}
