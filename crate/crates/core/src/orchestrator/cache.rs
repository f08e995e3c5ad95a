use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::features::ContractFeatures;
use crate::corpus::write_atomic;
use crate::error::{Error, ProblemDetail, Result};

pub const CACHE_COLUMNS: [&str; 10] = [
    "contract_id",
    "accession_no",
    "effective_date",
    "master_date",
    "dated_date",
    "termination_date",
    "evergreen",
    "is_master",
    "master_id",
    "parties",
];

/// One flat cache row. Dates are `DD/MM/YYYY` or empty; parties are
/// `role:name` joined by `;`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRow {
    pub contract_id: String,
    pub accession_no: String,
    pub effective_date: String,
    pub master_date: String,
    pub dated_date: String,
    pub termination_date: String,
    pub evergreen: bool,
    pub is_master: bool,
    pub master_id: String,
    pub parties: String,
}

impl CacheRow {
    pub fn from_features(f: &ContractFeatures) -> Self {
        let date = |d: Option<crate::extraction::CalendarDate>| d.map(|d| d.to_string()).unwrap_or_default();
        Self {
            contract_id: f.contract_id.clone(),
            accession_no: f.accession_no.clone(),
            effective_date: date(f.dates.effective),
            master_date: date(f.dates.master),
            dated_date: date(f.dates.dated),
            termination_date: date(f.lifecycle.as_ref().and_then(|l| l.termination)),
            evergreen: f.evergreen(),
            is_master: f.is_master,
            master_id: f.master_id.clone().unwrap_or_default(),
            parties: f.parties.iter().map(|p| format!("{}:{}", p.role.as_str(), p.name)).collect::<Vec<_>>().join(";"),
        }
    }
}

/// The CSV feature cache: one row per contract, ordered by contract id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureCache {
    pub rows: Vec<CacheRow>,
}

impl FeatureCache {
    pub fn from_features(features: &[ContractFeatures]) -> Self {
        let mut rows: Vec<CacheRow> = features.iter().map(CacheRow::from_features).collect();
        rows.sort_by(|a, b| a.contract_id.cmp(&b.contract_id));
        Self { rows }
    }

    /// RFC 4180 quoting, header row, UTF-8, LF line endings.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(CACHE_COLUMNS)?;
        }
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn from_csv(bytes: &[u8]) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().from_reader(bytes);
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header != CACHE_COLUMNS {
            return Err(Error::Format(format!("unexpected cache header {header:?}")));
        }
        let rows = r.deserialize().collect::<std::result::Result<Vec<CacheRow>, _>>()?;
        Ok(Self { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Paths of the cache and its sidecars for a cache file path.
pub fn sidecar_paths(cache_path: &Path) -> (PathBuf, PathBuf) {
    (cache_path.with_extension("errors.json"), cache_path.with_extension("features.json"))
}

fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}

/// Writes the CSV, the per-contract error sidecar and the lossless
/// features sidecar. Each file is replaced atomically.
pub fn write_cache(cache_path: &Path, features: &[ContractFeatures]) -> Result<FeatureCache> {
    let mut sorted: Vec<&ContractFeatures> = features.iter().collect();
    sorted.sort_by(|a, b| a.contract_id.cmp(&b.contract_id));
    let cache = FeatureCache::from_features(features);
    let errors: BTreeMap<&str, &[ProblemDetail]> = sorted
        .iter()
        .filter(|f| !f.errors.is_empty())
        .map(|f| (f.contract_id.as_str(), f.errors.as_slice()))
        .collect();
    let (errors_path, features_path) = sidecar_paths(cache_path);
    write_atomic(&features_path, &json_bytes(&sorted)?)?;
    write_atomic(&errors_path, &json_bytes(&errors)?)?;
    write_atomic(cache_path, &cache.to_csv()?)?;
    Ok(cache)
}

/// Loads the features sidecar written by [`write_cache`].
pub fn load_features(cache_path: &Path) -> Result<Vec<ContractFeatures>> {
    let (_, features_path) = sidecar_paths(cache_path);
    let bytes = std::fs::read(&features_path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::NotFound(features_path.display().to_string()),
        _ => Error::Io(e),
    })?;
    Ok(serde_json::from_slice(&bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(id: &str, parties: &str) -> CacheRow {
        CacheRow {
            contract_id: id.into(),
            accession_no: "0000950-05-000001".into(),
            effective_date: "01/02/2005".into(),
            master_date: "01/02/2005".into(),
            dated_date: String::new(),
            termination_date: String::new(),
            evergreen: true,
            is_master: true,
            master_id: id.into(),
            parties: parties.into(),
        }
    }

    #[test]
    fn round_trip_is_bit_exact_with_quoting() {
        let cache = FeatureCache { rows: vec![row("ct-0001", "fund:Acme, \"Growth\" Fund;custodian:State Bank"), row("ct-0002", "")] };
        let bytes = cache.to_csv().unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with("contract_id,accession_no,effective_date,"));
        assert!(!text.contains('\r'));
        assert!(text.contains("\"fund:Acme, \"\"Growth\"\" Fund;custodian:State Bank\""));
        let back = FeatureCache::from_csv(&bytes).unwrap();
        assert_eq!(back, cache);
        assert_eq!(back.to_csv().unwrap(), bytes);
    }

    #[test]
    fn empty_cache_keeps_header() {
        let bytes = FeatureCache::default().to_csv().unwrap();
        assert_eq!(String::from_utf8(bytes.clone()).unwrap().lines().count(), 1);
        assert!(FeatureCache::from_csv(&bytes).unwrap().is_empty());
    }

    #[test]
    fn rejects_foreign_header() {
        assert_eq!(FeatureCache::from_csv(b"a,b\n1,2\n").unwrap_err().code(), "E_FORMAT");
    }
}
