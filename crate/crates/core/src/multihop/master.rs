//! Amendment → master resolution.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::{normalize_name, CalendarDate, DateBundle, PartyRecord, PartyRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractKind {
    Master,
    Amendment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MasterLink {
    pub contract_id: String,
    pub kind: ContractKind,
    pub master_id: Option<String>,
}

#[derive(Debug, Clone)]
struct Entry {
    contract_id: String,
    is_master: bool,
    parties: BTreeSet<(String, PartyRole)>,
}

fn party_set(parties: &[PartyRecord]) -> BTreeSet<(String, PartyRole)> {
    parties.iter().map(|p| (normalize_name(&p.name), p.role)).collect()
}

/// Corpus-wide lookup of contracts by effective date. Built once, then
/// shared read-only.
#[derive(Debug, Clone, Default)]
pub struct MasterIndex {
    entries: Vec<Entry>,
    by_effective: HashMap<CalendarDate, Vec<usize>>,
}

impl MasterIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, contract_id: &str, dates: &DateBundle, parties: &[PartyRecord]) {
        let idx = self.entries.len();
        self.entries.push(Entry {
            contract_id: contract_id.to_string(),
            is_master: dates.is_master(),
            parties: party_set(parties),
        });
        if let Some(eff) = dates.effective {
            self.by_effective.entry(eff).or_default().push(idx);
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn shares(a: &BTreeSet<(String, PartyRole)>, b: &BTreeSet<(String, PartyRole)>, roles: &[PartyRole]) -> bool {
    a.iter().any(|p| roles.contains(&p.1) && b.iter().any(|q| q.0 == p.0))
}

fn jaccard(a: &BTreeSet<(String, PartyRole)>, b: &BTreeSet<(String, PartyRole)>) -> f64 {
    let a: BTreeSet<&str> = a.iter().map(|p| p.0.as_str()).collect();
    let b: BTreeSet<&str> = b.iter().map(|p| p.0.as_str()).collect();
    let union = a.union(&b).count();
    if union == 0 { 0.0 } else { a.intersection(&b).count() as f64 / union as f64 }
}

/// Classifies a contract and links amendments to their master. Never fails:
/// an unresolvable amendment comes back with `master_id: None`.
pub fn resolve_master_link(contract_id: &str, dates: &DateBundle, parties: &[PartyRecord], index: &MasterIndex) -> MasterLink {
    if dates.is_master() {
        return MasterLink { contract_id: contract_id.to_string(), kind: ContractKind::Master, master_id: Some(contract_id.to_string()) };
    }
    let mut link = MasterLink { contract_id: contract_id.to_string(), kind: ContractKind::Amendment, master_id: None };
    let Some(master_date) = dates.master else { return link };
    let mine = party_set(parties);
    let mut scored: Vec<(f64, &str)> = index
        .by_effective
        .get(&master_date)
        .into_iter()
        .flatten()
        .map(|&i| &index.entries[i])
        .filter(|e| e.is_master && e.contract_id != contract_id)
        .filter(|e| {
            shares(&mine, &e.parties, &[PartyRole::Custodian])
                && shares(&mine, &e.parties, &[PartyRole::Fund, PartyRole::Trust])
        })
        .map(|e| (jaccard(&mine, &e.parties), e.contract_id.as_str()))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    match scored.as_slice() {
        [] => {}
        [(_, id)] => link.master_id = Some(id.to_string()),
        [(best, id), (second, _), ..] if best > second => link.master_id = Some(id.to_string()),
        _ => {}
    }
    link
}

/// Like [`resolve_master_link`] but reports an amendment without a unique
/// master as `E_UNRESOLVED_MASTER`.
pub fn resolve_master(contract_id: &str, dates: &DateBundle, parties: &[PartyRecord], index: &MasterIndex) -> Result<MasterLink> {
    let link = resolve_master_link(contract_id, dates, parties, index);
    if link.master_id.is_none() {
        return Err(Error::UnresolvedMaster(contract_id.to_string()));
    }
    Ok(link)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bundle(eff: &str, master: &str) -> DateBundle {
        DateBundle { effective: Some(eff.parse().unwrap()), master: Some(master.parse().unwrap()), ..Default::default() }
    }

    fn party(name: &str, role: PartyRole) -> PartyRecord {
        PartyRecord { name: name.into(), role, match_score: 1.0, start: 0, end: 0 }
    }

    fn parties(names: &[(&str, PartyRole)]) -> Vec<PartyRecord> {
        names.iter().map(|(n, r)| party(n, *r)).collect()
    }

    #[test]
    fn master_links_to_itself() {
        let link = resolve_master("m", &bundle("13/06/2005", "13/06/2005"), &[], &MasterIndex::new()).unwrap();
        assert_eq!(link.kind, ContractKind::Master);
        assert_eq!(link.master_id.as_deref(), Some("m"));
    }

    #[test]
    fn amendment_finds_unique_master() {
        let fa = parties(&[("Fund A", PartyRole::Fund), ("Custodian C", PartyRole::Custodian)]);
        let other = parties(&[("Fund B", PartyRole::Fund), ("Custodian C", PartyRole::Custodian)]);
        let mut idx = MasterIndex::new();
        idx.insert("m1", &bundle("13/06/2005", "13/06/2005"), &fa);
        idx.insert("m2", &bundle("13/06/2005", "13/06/2005"), &other);
        idx.insert("m3", &bundle("14/06/2005", "14/06/2005"), &fa);
        let link = resolve_master("a1", &bundle("01/03/2010", "13/06/2005"), &fa, &idx).unwrap();
        assert_eq!(link.kind, ContractKind::Amendment);
        assert_eq!(link.master_id.as_deref(), Some("m1"));
    }

    #[test]
    fn absent_or_tied_master_is_unresolved() {
        let fa = parties(&[("Fund A", PartyRole::Fund), ("Custodian C", PartyRole::Custodian)]);
        let idx = MasterIndex::new();
        let err = resolve_master("a1", &bundle("01/03/2010", "13/06/2005"), &fa, &idx).unwrap_err();
        assert_eq!(err.code(), "E_UNRESOLVED_MASTER");
        let mut idx = MasterIndex::new();
        idx.insert("m1", &bundle("13/06/2005", "13/06/2005"), &fa);
        idx.insert("m2", &bundle("13/06/2005", "13/06/2005"), &fa);
        let link = resolve_master_link("a1", &bundle("01/03/2010", "13/06/2005"), &fa, &idx);
        assert_eq!(link.master_id, None);
    }

    #[test]
    fn jaccard_breaks_ties() {
        let full = parties(&[("Fund A", PartyRole::Fund), ("Trust T", PartyRole::Trust), ("Custodian C", PartyRole::Custodian)]);
        let partial = parties(&[("Fund A", PartyRole::Fund), ("Fund Z", PartyRole::Fund), ("Custodian C", PartyRole::Custodian)]);
        let mut idx = MasterIndex::new();
        idx.insert("m1", &bundle("13/06/2005", "13/06/2005"), &partial);
        idx.insert("m2", &bundle("13/06/2005", "13/06/2005"), &full);
        let link = resolve_master("a1", &bundle("01/03/2010", "13/06/2005"), &full, &idx).unwrap();
        assert_eq!(link.master_id.as_deref(), Some("m2"));
    }
}
