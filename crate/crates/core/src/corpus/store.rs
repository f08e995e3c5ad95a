//! On-disk corpus store: one directory per contract plus corpus-level
//! artifacts (index, feature cache, generator manifest).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use super::{ContractDoc, FilingMeta, SectionSpan};
use crate::error::{Error, Result};
use crate::index::SectionLabeler;

/// A raw document waiting to be ingested.
#[derive(Debug, Clone)]
pub struct RawInput {
    pub contract_id: String,
    pub markup: String,
    pub meta: FilingMeta,
}

#[derive(Debug, Clone)]
pub struct CorpusStore {
    root: PathBuf,
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub(crate) fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::NotFound(path.display().to_string()),
        _ => Error::Io(e),
    })?;
    Ok(serde_json::from_slice(&bytes)?)
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id != "."
        && id != ".."
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

impl CorpusStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("contracts"))?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn index_path(&self) -> PathBuf {
        self.root.join("index.lxidx")
    }

    pub fn cache_path(&self) -> PathBuf {
        self.root.join("cache.csv")
    }

    /// Ground-truth manifest written alongside synthetic corpora.
    pub fn manifest_path(&self) -> PathBuf {
        self.root.join("manifest.json")
    }

    fn contract_dir(&self, id: &str) -> Result<PathBuf> {
        if !valid_id(id) {
            return Err(Error::NotFound(format!("contract {id}")));
        }
        Ok(self.root.join("contracts").join(id))
    }

    /// Writes (or overwrites) all artifacts of a document.
    pub fn save_doc(&self, doc: &ContractDoc) -> Result<()> {
        let dir = self.contract_dir(&doc.contract_id)?;
        write_atomic(&dir.join("raw.htm"), doc.raw_markup.as_bytes())?;
        write_atomic(&dir.join("text.txt"), doc.plain_text.as_bytes())?;
        write_json(&dir.join("sections.json"), &doc.sections)?;
        write_json(&dir.join("contract.json"), doc)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.contract_dir(id).map(|d| d.join("contract.json").exists()).unwrap_or(false)
    }

    pub fn load_doc(&self, id: &str) -> Result<ContractDoc> {
        let dir = self.contract_dir(id)?;
        let mut doc: ContractDoc = read_json(&dir.join("contract.json"))
            .map_err(|_| Error::NotFound(format!("contract {id}")))?;
        doc.raw_markup = fs::read_to_string(dir.join("raw.htm"))?;
        doc.plain_text = fs::read_to_string(dir.join("text.txt"))?;
        doc.sections = read_json::<Vec<SectionSpan>>(&dir.join("sections.json"))?;
        Ok(doc)
    }

    /// Contract ids in lexicographic order.
    pub fn contract_ids(&self) -> Result<Vec<String>> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(self.root.join("contracts"))? {
            let entry = entry?;
            if entry.path().join("contract.json").exists() {
                ids.push(entry.file_name().to_string_lossy().into_owned());
            }
        }
        ids.sort();
        Ok(ids)
    }

    pub fn load_all(&self) -> Result<Vec<ContractDoc>> {
        self.contract_ids()?.par_iter().map(|id| self.load_doc(id)).collect()
    }
}

/// Normalises, sectionises and labels raw documents in parallel. Output
/// order follows input order.
pub fn ingest_documents(inputs: Vec<RawInput>, labeler: &dyn SectionLabeler) -> Vec<ContractDoc> {
    inputs
        .into_par_iter()
        .map(|input| {
            let mut doc = ContractDoc::from_markup(input.contract_id, input.markup, input.meta);
            for s in &mut doc.sections {
                let (label, score) = labeler.label(&s.heading_text, &s.body_text);
                s.title_label = label;
                s.label_score = score;
            }
            doc
        })
        .collect()
}

/// Ingests every `*.htm`/`*.html` file in `dir` (with an optional
/// `<id>.json` metadata sidecar) into `store`. Returns the ingested ids.
pub fn ingest_dir(dir: &Path, store: &CorpusStore, labeler: &dyn SectionLabeler) -> Result<Vec<String>> {
    let mut inputs = Vec::new();
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("htm" | "html" | "txt")))
        .collect();
    entries.sort();
    for path in entries {
        let id = path.file_stem().unwrap().to_string_lossy().into_owned();
        if !valid_id(&id) {
            log::warn!("skipping {}: not a usable contract id", path.display());
            continue;
        }
        let markup = String::from_utf8_lossy(&fs::read(&path)?).into_owned();
        let meta_path = path.with_extension("json");
        let meta = if meta_path.exists() { read_json(&meta_path)? } else { FilingMeta::default() };
        inputs.push(RawInput { contract_id: id, markup, meta });
    }
    let docs = ingest_documents(inputs, labeler);
    docs.par_iter().try_for_each(|d| store.save_doc(d))?;
    Ok(docs.into_iter().map(|d| d.contract_id).collect())
}
