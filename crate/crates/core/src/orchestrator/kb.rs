use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::features::{compute_features, ContractFeatures};
use crate::agents::{compare_clauses, summarize, ClauseInput, LlmClient, TokenBudget};
use crate::config::Config;
use crate::corpus::{ContractDoc, SectionSpan};
use crate::error::{Error, Result};
use crate::extraction::{normalize_name, CalendarDate, DateKind, PartyRegistry};
use crate::index::{build_index_with, Bm25Params, SearchIndex};
use crate::labels::ClauseLabel;
use crate::plan::{Citation, Entities, SectionRef, ToolHost, ToolOutput, Value};

/// An immutable snapshot of the corpus with everything the tools read.
pub struct KnowledgeBase {
    docs: BTreeMap<String, ContractDoc>,
    index: SearchIndex,
    features: BTreeMap<String, ContractFeatures>,
    registry: PartyRegistry,
    config: Config,
    client: Arc<dyn LlmClient>,
    budget: TokenBudget,
}

fn bm25_params(config: &Config) -> Bm25Params {
    Bm25Params { k1: config.index.k1, b: config.index.b, title_weight: config.index.title_weight }
}

impl KnowledgeBase {
    /// Indexes the documents and computes their features.
    pub fn build(docs: Vec<ContractDoc>, config: Config, client: Arc<dyn LlmClient>) -> Result<Self> {
        let registry = PartyRegistry::from_corpus(&docs);
        let features = compute_features(&docs, &registry, config.extraction.party_threshold);
        let index = build_index_with(docs.iter().flat_map(|d| d.sections.iter().cloned()).collect(), bm25_params(&config));
        Self::from_parts(docs, index, features, config, client)
    }

    /// Assembles a snapshot from previously built artifacts.
    pub fn from_parts(
        docs: Vec<ContractDoc>,
        index: SearchIndex,
        features: Vec<ContractFeatures>,
        config: Config,
        client: Arc<dyn LlmClient>,
    ) -> Result<Self> {
        config.validate()?;
        let budget = TokenBudget::new(config.agents.context_limit, config.agents.chunk_size)?;
        let registry = PartyRegistry::from_corpus(&docs);
        Ok(Self {
            docs: docs.into_iter().map(|d| (d.contract_id.clone(), d)).collect(),
            index,
            features: features.into_iter().map(|f| (f.contract_id.clone(), f)).collect(),
            registry,
            config,
            client,
            budget,
        })
    }

    pub fn docs(&self) -> impl Iterator<Item = &ContractDoc> {
        self.docs.values()
    }

    pub fn doc(&self, id: &str) -> Option<&ContractDoc> {
        self.docs.get(id)
    }

    pub fn features(&self, id: &str) -> Option<&ContractFeatures> {
        self.features.get(id)
    }

    pub fn all_features(&self) -> impl Iterator<Item = &ContractFeatures> {
        self.features.values()
    }

    pub fn index(&self) -> &SearchIndex {
        &self.index
    }

    pub fn registry(&self) -> &PartyRegistry {
        &self.registry
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn client(&self) -> &Arc<dyn LlmClient> {
        &self.client
    }

    pub fn budget(&self) -> &TokenBudget {
        &self.budget
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Contracts naming the given entity, or `None` when the name matches
    /// no registry party.
    pub fn contracts_naming(&self, name: &str) -> Option<BTreeSet<String>> {
        let entry = self.registry.resolve(name, self.config.extraction.party_threshold)?;
        Some(
            self.features
                .values()
                .filter(|f| f.parties.iter().any(|p| normalize_name(&p.name) == entry.normalized()))
                .map(|f| f.contract_id.clone())
                .collect(),
        )
    }

    /// Contracts naming every populated entity, oldest first. Entities that
    /// resolve to nothing make the result empty.
    pub fn agreements_for(&self, entities: &Entities) -> Vec<String> {
        let mut acc: Option<BTreeSet<String>> = None;
        for (_, _, name) in entities.populated() {
            let found = self.contracts_naming(name).unwrap_or_default();
            acc = Some(match acc {
                None => found,
                Some(a) => a.intersection(&found).cloned().collect(),
            });
        }
        let mut ids: Vec<String> = acc.unwrap_or_default().into_iter().collect();
        ids.sort_by_key(|id| (self.effective(id).is_none(), self.effective(id), id.clone()));
        ids
    }

    /// Fails with `E_UNKNOWN_ENTITY` when no populated entity names any
    /// contract.
    pub fn check_entities(&self, entities: &Entities) -> Result<()> {
        let any = entities.populated().iter().any(|(_, _, n)| self.contracts_naming(n).is_some_and(|s| !s.is_empty()));
        if any {
            Ok(())
        } else {
            Err(Error::UnknownEntity(entities.describe()))
        }
    }

    fn effective(&self, id: &str) -> Option<CalendarDate> {
        self.features.get(id).and_then(|f| f.dates.effective)
    }

    fn cite_offset(&self, id: &str, offset: Option<usize>) -> Citation {
        let ordinal = self
            .docs
            .get(id)
            .and_then(|d| offset.and_then(|o| d.section_at(o)))
            .map_or(0, |s| s.ordinal);
        Citation { contract_id: id.to_string(), ordinal }
    }

    fn cite_kind(&self, id: &str, kind: DateKind) -> Citation {
        let offset = self.features.get(id).and_then(|f| f.dates.evidence.get(&kind)).map(|e| e.start);
        self.cite_offset(id, offset)
    }

    /// The best section for a clause in one contract: among BM25 hits for
    /// the clause name, the first carrying that label. Names that are not
    /// labels take the top hit.
    pub fn best_section(&self, id: &str, clause: &str) -> Option<SectionSpan> {
        let label: Option<ClauseLabel> = clause.parse().ok().filter(|l: &ClauseLabel| !l.is_unknown());
        let hits = self.index.search(id, clause, self.config.index.top_k);
        let fits = |s: &SectionSpan| !s.body_text.trim().is_empty() && label.is_none_or(|l| s.title_label == l);
        if let Some(h) = hits.into_iter().find(|h| fits(&h.section)) {
            return Some(h.section);
        }
        // Labelled sections the query words miss entirely.
        let l = label?;
        self.docs.get(id)?.sections.iter().find(|s| s.title_label == l && !s.body_text.trim().is_empty()).cloned()
    }

    fn section_text(&self, r: &SectionRef) -> std::result::Result<&SectionSpan, String> {
        self.docs
            .get(&r.contract_id)
            .and_then(|d| d.sections.get(r.ordinal))
            .ok_or_else(|| format!("no section {}#{}", r.contract_id, r.ordinal))
    }
}

fn contracts(args: &BTreeMap<String, Value>) -> std::result::Result<Vec<String>, String> {
    match args.get("agg_list") {
        Some(Value::List(items)) => items
            .iter()
            .map(|v| match v {
                Value::Contract(id) => Ok(id.clone()),
                other => Err(format!("agg_list holds a {}", other.kind())),
            })
            .collect(),
        _ => Err("agg_list is required".into()),
    }
}

fn sections(args: &BTreeMap<String, Value>) -> std::result::Result<Vec<SectionRef>, String> {
    match args.get("sections") {
        Some(Value::List(items)) => items
            .iter()
            .map(|v| match v {
                Value::Section(s) => Ok(s.clone()),
                other => Err(format!("sections holds a {}", other.kind())),
            })
            .collect(),
        _ => Err("sections is required".into()),
    }
}

fn str_arg<'a>(args: &'a BTreeMap<String, Value>, name: &str) -> Option<&'a str> {
    match args.get(name) {
        Some(Value::Str(s)) => Some(s),
        _ => None,
    }
}

impl KnowledgeBase {
    fn known(&self, id: &str) -> std::result::Result<&ContractFeatures, String> {
        self.features.get(id).ok_or_else(|| format!("unknown contract {id}"))
    }

    fn tool_agreements(&self, args: &BTreeMap<String, Value>) -> std::result::Result<ToolOutput, String> {
        let entities = Entities {
            fund: str_arg(args, "funds").map(str::to_string),
            trust: str_arg(args, "trusts").map(str::to_string),
            custodian: str_arg(args, "custodians").map(str::to_string),
        };
        if entities.populated().is_empty() {
            return Err("at least one of funds, trusts or custodians is required".into());
        }
        let ids = self.agreements_for(&entities);
        let citations = ids.iter().map(|id| self.cite_kind(id, DateKind::Effective)).collect();
        Ok(ToolOutput { value: Value::List(ids.into_iter().map(Value::Contract).collect()), citations, detail: None })
    }

    fn tool_dates(&self, args: &BTreeMap<String, Value>) -> std::result::Result<ToolOutput, String> {
        let kind = str_arg(args, "kind").and_then(DateKind::parse).ok_or("kind must be effective, master or dated")?;
        let mut out = ToolOutput::new(Value::List(vec![]));
        let mut items = Vec::new();
        for id in contracts(args)? {
            if let Some(d) = self.known(&id)?.dates.get(kind) {
                out.citations.push(self.cite_kind(&id, kind));
                items.push(Value::pair(Value::Contract(id), Value::Date(d)));
            }
        }
        out.value = Value::List(items);
        Ok(out)
    }

    fn tool_parties(&self, args: &BTreeMap<String, Value>) -> std::result::Result<ToolOutput, String> {
        let mut out = ToolOutput::new(Value::List(vec![]));
        let mut items = Vec::new();
        for id in contracts(args)? {
            for p in &self.known(&id)?.parties {
                out.citations.push(self.cite_offset(&id, Some(p.start)));
                items.push(Value::pair(Value::Contract(id.clone()), Value::Str(p.name.clone())));
            }
        }
        out.value = Value::List(items);
        Ok(out)
    }

    fn tool_lifecycle(&self, args: &BTreeMap<String, Value>) -> std::result::Result<ToolOutput, String> {
        let mut out = ToolOutput::new(Value::List(vec![]));
        let mut items = Vec::new();
        for id in contracts(args)? {
            let f = self.known(&id)?;
            let Some(l) = &f.lifecycle else { continue };
            let offset = l.evidence.as_ref().map(|e| e.start).or_else(|| {
                let doc = self.docs.get(&id)?;
                doc.sections.iter().find(|s| s.title_label == ClauseLabel::Termination).map(|s| s.start_offset)
            });
            out.citations.push(self.cite_offset(&id, offset));
            items.push(Value::pair(Value::Contract(id), Value::Str(l.render())));
        }
        out.value = Value::List(items);
        Ok(out)
    }

    fn tool_master(&self, args: &BTreeMap<String, Value>) -> std::result::Result<ToolOutput, String> {
        let mut masters: Vec<String> = Vec::new();
        for id in contracts(args)? {
            if let Some(m) = &self.known(&id)?.master_id {
                if !masters.contains(m) {
                    masters.push(m.clone());
                }
            }
        }
        masters.sort_by_key(|id| (self.effective(id).is_none(), self.effective(id), id.clone()));
        let citations = masters.iter().map(|id| self.cite_kind(id, DateKind::Effective)).collect();
        Ok(ToolOutput { value: Value::List(masters.into_iter().map(Value::Contract).collect()), citations, detail: None })
    }

    fn tool_section(&self, args: &BTreeMap<String, Value>) -> std::result::Result<ToolOutput, String> {
        let name = str_arg(args, "section_name").ok_or("section_name is required")?;
        let mut out = ToolOutput::new(Value::List(vec![]));
        let mut items = Vec::new();
        for id in contracts(args)? {
            self.known(&id)?;
            if let Some(s) = self.best_section(&id, name) {
                out.citations.push(Citation { contract_id: id.clone(), ordinal: s.ordinal });
                items.push(Value::Section(SectionRef { contract_id: id, ordinal: s.ordinal }));
            }
        }
        out.value = Value::List(items);
        Ok(out)
    }

    fn tool_summary(&self, args: &BTreeMap<String, Value>) -> std::result::Result<ToolOutput, String> {
        let refs = sections(args)?;
        let spans = refs.iter().map(|r| self.section_text(r)).collect::<std::result::Result<Vec<_>, _>>()?;
        let texts: Vec<&str> = spans.iter().map(|s| s.body_text.as_str()).collect();
        let text = summarize(&texts, &self.budget, self.client.as_ref(), self.config.agents.max_parallel).map_err(|e| e.to_string())?;
        let citations = refs.into_iter().map(|r| Citation { contract_id: r.contract_id, ordinal: r.ordinal }).collect();
        Ok(ToolOutput { value: Value::Text(text), citations, detail: None })
    }

    fn tool_comparison(&self, args: &BTreeMap<String, Value>) -> std::result::Result<ToolOutput, String> {
        let refs = sections(args)?;
        let inputs = refs
            .iter()
            .map(|r| {
                self.section_text(r).map(|s| ClauseInput {
                    contract_id: r.contract_id.clone(),
                    effective_date: self.effective(&r.contract_id),
                    text: s.body_text.clone(),
                })
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let chain = compare_clauses(inputs, &self.budget, self.client.as_ref()).map_err(|e| e.to_string())?;
        let citations = refs.into_iter().map(|r| Citation { contract_id: r.contract_id, ordinal: r.ordinal }).collect();
        let detail = serde_json::to_value(&chain).map_err(|e| e.to_string())?;
        Ok(ToolOutput { value: Value::Text(chain.render()), citations, detail: Some(detail) })
    }
}

impl ToolHost for KnowledgeBase {
    fn call(&self, tool: &str, args: &BTreeMap<String, Value>) -> std::result::Result<ToolOutput, String> {
        match tool {
            "get_agreements_for" => self.tool_agreements(args),
            "get_dates" => self.tool_dates(args),
            "get_parties" => self.tool_parties(args),
            "get_lifecycle" => self.tool_lifecycle(args),
            "get_master" => self.tool_master(args),
            "get_section_v2" => self.tool_section(args),
            "get_summary_v1" => self.tool_summary(args),
            "get_comparison_v1" => self.tool_comparison(args),
            other => Err(format!("no implementation for {other}")),
        }
    }
}
