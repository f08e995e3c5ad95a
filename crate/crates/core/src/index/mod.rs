//! Section labelling and per-contract BM25 section search.
//!
//! Persisted index files start with the 8-byte magic `LXIDX\0\0\0`, a
//! little-endian `u32` format version, then a JSON body.

mod labeler;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use labeler::{label_section, label_section_with, normalize_heading, LabeledSection, LexiconLabeler, SectionLabeler};

use crate::corpus::SectionSpan;
use crate::error::{Error, Result};
use crate::text::index_terms;

pub const MAGIC: &[u8; 8] = b"LXIDX\0\0\0";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
    pub title_weight: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75, title_weight: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub section: u32,
    pub body_tf: u32,
    pub title_tf: u32,
}

/// Immutable inverted index over labelled sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchIndex {
    pub params: Bm25Params,
    pub sections: Vec<SectionSpan>,
    /// Body length in tokens, per section.
    pub lengths: Vec<u32>,
    pub avgdl: f64,
    pub postings: BTreeMap<String, Vec<Posting>>,
    by_contract: BTreeMap<String, Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchHit {
    pub section: SectionSpan,
    pub score: f64,
}

/// Tokens of the title field: the label text followed by the heading text.
pub fn title_terms(section: &SectionSpan) -> Vec<String> {
    let label = if section.title_label.is_unknown() { "" } else { section.title_label.as_str() };
    index_terms(&format!("{label} {}", section.heading_text))
}

fn counts(tokens: &[String]) -> HashMap<&str, u32> {
    let mut m = HashMap::new();
    for t in tokens {
        *m.entry(t.as_str()).or_insert(0) += 1;
    }
    m
}

/// Inverse document frequency as used by the index.
pub fn idf(n_sections: usize, doc_freq: usize) -> f64 {
    let (n, df) = (n_sections as f64, doc_freq as f64);
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

pub fn build_index(sections: Vec<SectionSpan>) -> SearchIndex {
    build_index_with(sections, Bm25Params::default())
}

pub fn build_index_with(mut sections: Vec<SectionSpan>, params: Bm25Params) -> SearchIndex {
    sections.sort_by(|a, b| a.contract_id.cmp(&b.contract_id).then(a.ordinal.cmp(&b.ordinal)));
    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut lengths = Vec::with_capacity(sections.len());
    let mut by_contract: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    for (i, s) in sections.iter().enumerate() {
        let body = index_terms(&s.body_text);
        let title = title_terms(s);
        lengths.push(body.len() as u32);
        let body_c = counts(&body);
        let title_c = counts(&title);
        let mut terms: Vec<&str> = body_c.keys().chain(title_c.keys()).copied().collect();
        terms.sort_unstable();
        terms.dedup();
        for t in terms {
            postings.entry(t.to_string()).or_default().push(Posting {
                section: i as u32,
                body_tf: body_c.get(t).copied().unwrap_or(0),
                title_tf: title_c.get(t).copied().unwrap_or(0),
            });
        }
        by_contract.entry(s.contract_id.clone()).or_default().push(i as u32);
    }
    let avgdl = if lengths.is_empty() { 0.0 } else { lengths.iter().map(|&l| f64::from(l)).sum::<f64>() / lengths.len() as f64 };
    SearchIndex { params, sections, lengths, avgdl, postings, by_contract }
}

impl SearchIndex {
    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    pub fn contract_ids(&self) -> impl Iterator<Item = &str> {
        self.by_contract.keys().map(String::as_str)
    }

    /// Sections of one contract in ordinal order.
    pub fn sections_of(&self, contract_id: &str) -> Vec<&SectionSpan> {
        self.by_contract
            .get(contract_id)
            .map(|ids| ids.iter().map(|&i| &self.sections[i as usize]).collect())
            .unwrap_or_default()
    }

    fn term_score(&self, idf: f64, p: &Posting) -> f64 {
        let Bm25Params { k1, b, title_weight } = self.params;
        let tf = f64::from(p.body_tf) + title_weight * f64::from(p.title_tf);
        let dl = f64::from(self.lengths[p.section as usize]);
        let norm = if self.avgdl > 0.0 { 1.0 - b + b * dl / self.avgdl } else { 1.0 };
        idf * tf * (k1 + 1.0) / (tf + k1 * norm)
    }

    /// Top-`k` sections of `contract_id` for `query`, by BM25 score
    /// descending then ordinal ascending. Sections sharing no term with the
    /// query are not returned; an unknown contract yields an empty list.
    pub fn search(&self, contract_id: &str, query: &str, k: usize) -> Vec<SearchHit> {
        let Some(members) = self.by_contract.get(contract_id) else { return Vec::new() };
        let members: HashSet<u32> = members.iter().copied().collect();
        let mut terms = index_terms(query);
        terms.sort_unstable();
        terms.dedup();
        let mut scores: HashMap<u32, f64> = HashMap::new();
        for term in &terms {
            let Some(list) = self.postings.get(term) else { continue };
            let idf = idf(self.sections.len(), list.len());
            for p in list.iter().filter(|p| members.contains(&p.section)) {
                *scores.entry(p.section).or_default() += self.term_score(idf, p);
            }
        }
        let mut hits: Vec<(u32, f64)> = scores.into_iter().collect();
        hits.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then(self.sections[a.0 as usize].ordinal.cmp(&self.sections[b.0 as usize].ordinal))
        });
        hits.truncate(k);
        hits.into_iter()
            .map(|(i, score)| SearchHit { section: self.sections[i as usize].clone(), score })
            .collect()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = MAGIC.to_vec();
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        serde_json::to_writer(&mut out, self)?;
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 12 || &bytes[..8] != MAGIC {
            return Err(Error::Format("not an index file (bad magic)".into()));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported index version {version}")));
        }
        Ok(serde_json::from_slice(&bytes[12..])?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::corpus::write_atomic(path, &self.to_bytes()?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

/// Convenience wrapper over [`SearchIndex::search`].
pub fn search_sections(index: &SearchIndex, contract_id: &str, clause_query: &str, k: usize) -> Vec<SearchHit> {
    index.search(contract_id, clause_query, k)
}
