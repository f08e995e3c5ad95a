//! Agentic query engine for custody and fund-services contracts.
//!
//! The crate is organised the way a query flows through the system:
//!
//! - [`corpus`]: ingest markup, normalise it, split it into sections, and
//!   generate seeded synthetic corpora with ground-truth manifests.
//! - [`extraction`]: deterministic date and party extraction tools.
//! - [`multihop`]: termination-date computation and amendment → master
//!   resolution built on top of the extraction tools.
//! - [`index`]: clause labelling and per-contract BM25 section search.
//! - [`agents`]: token budgeting, chunked map-reduce summaries and
//!   pairwise clause comparison over a pluggable [`agents::LlmClient`].
//! - [`plan`]: the restricted plan language, its three validation tiers,
//!   the interpreter and the repair loop.
//! - [`orchestrator`]: query templates, the CSV feature cache and the
//!   [`orchestrator::Engine`] that answers queries end to end.
//! - [`eval`]: templated query datasets, the truncated-context baseline and
//!   scorecards.

pub mod agents;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod extraction;
pub mod index;
pub mod labels;
pub mod multihop;
pub mod orchestrator;
pub mod plan;
pub mod text;

pub use config::Config;
pub use error::{Error, ProblemDetail, Result};
pub use labels::ClauseLabel;
