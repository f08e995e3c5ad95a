use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::ContractDoc;
use crate::error::{Error, ProblemDetail};
use crate::extraction::{extract_dates, extract_parties, DateBundle, PartyRecord, PartyRegistry};
use crate::multihop::{compute_lifecycle, resolve_master, LifecycleBasis, LifecycleResult, MasterIndex};

/// Everything the extraction and multi-hop tools know about one contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractFeatures {
    pub contract_id: String,
    pub accession_no: String,
    pub dates: DateBundle,
    pub lifecycle: Option<LifecycleResult>,
    pub is_master: bool,
    pub master_id: Option<String>,
    pub parties: Vec<PartyRecord>,
    /// Tool failures for this contract; the other fields stay usable.
    pub errors: Vec<ProblemDetail>,
}

impl ContractFeatures {
    pub fn evergreen(&self) -> bool {
        self.lifecycle.as_ref().is_some_and(|l| l.basis == LifecycleBasis::Evergreen)
    }
}

/// Runs the extraction and multi-hop tools over every contract. Master
/// resolution needs the whole corpus, so it runs as a second pass.
pub fn compute_features(docs: &[ContractDoc], registry: &PartyRegistry, party_threshold: f64) -> Vec<ContractFeatures> {
    let mut features: Vec<ContractFeatures> = docs
        .par_iter()
        .map(|doc| {
            let mut errors = Vec::new();
            let dates = extract_dates(doc).unwrap_or_else(|e| {
                errors.push(e.to_problem());
                DateBundle::default()
            });
            let lifecycle = match compute_lifecycle(doc, &dates, &doc.sections) {
                Ok(l) => Some(l),
                Err(e) => {
                    errors.push(e.to_problem());
                    None
                }
            };
            ContractFeatures {
                contract_id: doc.contract_id.clone(),
                accession_no: doc.accession_no.clone(),
                is_master: dates.is_master(),
                dates,
                lifecycle,
                master_id: None,
                parties: extract_parties(doc, registry, party_threshold),
                errors,
            }
        })
        .collect();
    let mut index = MasterIndex::new();
    for f in &features {
        index.insert(&f.contract_id, &f.dates, &f.parties);
    }
    features.par_iter_mut().for_each(|f| {
        if f.dates.effective.is_none() {
            return;
        }
        match resolve_master(&f.contract_id, &f.dates, &f.parties, &index) {
            Ok(link) => f.master_id = link.master_id,
            Err(e @ Error::UnresolvedMaster(_)) => f.errors.push(e.to_problem()),
            Err(e) => f.errors.push(e.to_problem()),
        }
    });
    features
}
