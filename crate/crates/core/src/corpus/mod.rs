//! Contract ingestion: markup normalisation, sectionisation, the on-disk
//! corpus store, the rate-limited fetcher and the synthetic generator.

mod fetch;
mod markup;
mod sectionize;
mod store;

pub(crate) use store::write_atomic;
mod synth;

use serde::{Deserialize, Serialize};

pub use fetch::{contract_id_for, fetch_remote, FetchOptions, FetchOutcome, HttpTransport, RawDocument, Transport, TransportResponse};
pub use markup::normalize_markup;
pub use sectionize::{sectionize, HeadingKind};
pub use store::{ingest_dir, ingest_documents, CorpusStore, RawInput};
pub use synth::{
    generate_corpus, generate_corpus_sized, ContractTruth, CorpusManifest, FamilyTruth, GeneratedCorpus,
    HeadingStyle, PartyTruth, SectionTruth, StyleMix,
};

use crate::extraction::CalendarDate;
use crate::labels::ClauseLabel;

/// A clause-level segment of a contract. Offsets are byte offsets into the
/// owning document's `plain_text`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionSpan {
    pub contract_id: String,
    pub ordinal: usize,
    pub heading_text: String,
    pub title_label: ClauseLabel,
    /// Confidence of `title_label`; 0 until the section is labelled.
    #[serde(default)]
    pub label_score: f64,
    pub body_text: String,
    pub start_offset: usize,
    pub end_offset: usize,
}

/// One ingested contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractDoc {
    pub contract_id: String,
    pub accession_no: String,
    pub source_uri: String,
    #[serde(skip)]
    pub raw_markup: String,
    #[serde(skip)]
    pub plain_text: String,
    pub filed_date: Option<CalendarDate>,
    pub metadata_parties: Vec<String>,
    #[serde(skip)]
    pub sections: Vec<SectionSpan>,
}

/// Filing metadata that accompanies a raw document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FilingMeta {
    #[serde(default)]
    pub accession_no: String,
    #[serde(default)]
    pub source_uri: String,
    #[serde(default)]
    pub filed_date: Option<CalendarDate>,
    #[serde(default)]
    pub metadata_parties: Vec<String>,
}

impl ContractDoc {
    /// Normalises and sectionises raw markup. Sections come back unlabelled.
    pub fn from_markup(contract_id: impl Into<String>, raw_markup: impl Into<String>, meta: FilingMeta) -> Self {
        let raw_markup = raw_markup.into();
        let plain_text = normalize_markup(&raw_markup);
        let mut doc = Self {
            contract_id: contract_id.into(),
            accession_no: meta.accession_no,
            source_uri: meta.source_uri,
            raw_markup,
            plain_text,
            filed_date: meta.filed_date,
            metadata_parties: meta.metadata_parties,
            sections: Vec::new(),
        };
        doc.sections = sectionize(&doc);
        doc
    }

    /// A document whose plain text is given directly (raw = text).
    pub fn from_text(contract_id: impl Into<String>, text: &str) -> Self {
        let mut doc = Self {
            contract_id: contract_id.into(),
            accession_no: String::new(),
            source_uri: String::new(),
            raw_markup: text.to_string(),
            plain_text: text.to_string(),
            filed_date: None,
            metadata_parties: Vec::new(),
            sections: Vec::new(),
        };
        doc.sections = sectionize(&doc);
        doc
    }

    /// The section whose span contains `offset`.
    pub fn section_at(&self, offset: usize) -> Option<&SectionSpan> {
        self.sections
            .iter()
            .find(|s| s.start_offset <= offset && offset < s.end_offset)
    }

    pub fn meta(&self) -> FilingMeta {
        FilingMeta {
            accession_no: self.accession_no.clone(),
            source_uri: self.source_uri.clone(),
            filed_date: self.filed_date,
            metadata_parties: self.metadata_parties.clone(),
        }
    }
}
