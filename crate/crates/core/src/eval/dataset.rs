use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CaseKind, EvalCase};
use crate::agents::{compare_clauses, summarize, ClauseInput};
use crate::corpus::{ContractTruth, CorpusManifest, FamilyTruth};
use crate::error::{Error, Result};
use crate::extraction::PartyRole;
use crate::labels::ClauseLabel;
use crate::orchestrator::KnowledgeBase;
use crate::plan::{sample_indices, Entities, QuerySpec, SectionRef, Task};

/// A set of entity roles populated in a query.
pub type Combo = &'static [PartyRole];

/// Single roles and pairs. The full triple is left out so that the task
/// and combo counts multiply out to the 720-query design.
pub const COMBOS: [Combo; 6] = [
    &[PartyRole::Fund],
    &[PartyRole::Trust],
    &[PartyRole::Custodian],
    &[PartyRole::Fund, PartyRole::Trust],
    &[PartyRole::Fund, PartyRole::Custodian],
    &[PartyRole::Trust, PartyRole::Custodian],
];

const BASELINE_SHOWN: usize = 4;
const COMPARE_SAMPLE: usize = 5;

fn combo_name(combo: Combo) -> String {
    combo.iter().map(|r| r.as_str()).collect::<Vec<_>>().join("+")
}

fn party<'a>(f: &'a FamilyTruth, role: PartyRole) -> Option<&'a str> {
    f.parties.iter().find(|p| p.role == role).map(|p| p.name.as_str())
}

fn entities_for(f: &FamilyTruth, combo: Combo) -> Option<Entities> {
    let mut e = Entities::default();
    for role in combo {
        let name = party(f, *role)?.to_string();
        match role {
            PartyRole::Fund => e.fund = Some(name),
            PartyRole::Trust => e.trust = Some(name),
            PartyRole::Custodian => e.custodian = Some(name),
            PartyRole::Other => return None,
        }
    }
    Some(e)
}

/// Families whose parties include every populated entity.
fn relevant<'a>(m: &'a CorpusManifest, e: &Entities) -> Vec<&'a FamilyTruth> {
    let names: Vec<&str> = e.populated().iter().map(|(_, _, n)| *n).collect();
    m.families.iter().filter(|f| names.iter().all(|n| f.parties.iter().any(|p| p.name == *n))).collect()
}

fn by_effective<'a>(mut cs: Vec<&'a ContractTruth>) -> Vec<&'a ContractTruth> {
    cs.sort_by(|a, b| (a.effective_date, &a.contract_id).cmp(&(b.effective_date, &b.contract_id)));
    cs
}

fn retrieval_truth(task: Task, families: &[&FamilyTruth]) -> Vec<String> {
    let contracts = families.iter().flat_map(|f| f.contracts.iter());
    match task {
        Task::ExploreAll => contracts.map(|c| c.contract_id.clone()).collect(),
        Task::FindMasterAgreements => families.iter().map(|f| f.master_id.clone()).collect(),
        Task::FindMasterDates => contracts.map(|c| format!("{}|{}", c.contract_id, c.master_date)).collect(),
        Task::FindTerminationDates => contracts.map(|c| format!("{}|{}", c.contract_id, c.termination_text())).collect(),
        Task::FindParties => contracts
            .flat_map(|c| c.parties.iter().map(move |p| format!("{}|{}", c.contract_id, p.name)))
            .collect(),
        _ => Vec::new(),
    }
}

fn clause_section(c: &ContractTruth, label: ClauseLabel) -> Option<SectionRef> {
    c.sections
        .iter()
        .position(|s| s.label == label)
        .map(|ordinal| SectionRef { contract_id: c.contract_id.clone(), ordinal })
}

fn pick<T: Clone>(items: &[T], n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut v: Vec<T> = items.choose_multiple(rng, n.min(items.len())).cloned().collect();
    v.truncate(n);
    v
}

/// Builds the templated dataset: for each retrieval task and combo,
/// `n_retrieval` cases; for summarize and compare and each combo,
/// `n_analytical` cases. Truth is read straight from the manifest.
/// Analytical references are attached separately by [`attach_references`].
pub fn build_dataset(manifest: &CorpusManifest, n_retrieval: usize, n_analytical: usize, seed: u64) -> Result<Vec<EvalCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all_ids: Vec<String> = manifest.contracts().map(|c| c.contract_id.clone()).collect();
    let mut cases = Vec::new();
    for combo in COMBOS {
        let name = combo_name(combo);
        let candidates: Vec<(&FamilyTruth, Entities)> =
            manifest.families.iter().filter_map(|f| entities_for(f, combo).map(|e| (f, e))).collect();
        if candidates.is_empty() {
            return Err(Error::InsufficientCorpus(format!("no family populates {name}")));
        }
        let tasks = Task::RETRIEVAL.iter().map(|t| (*t, n_retrieval)).chain([(Task::SummarizeClause, n_analytical), (Task::CompareClause, n_analytical)]);
        for (task, n) in tasks {
            for i in 0..n {
                let (_, entities) = candidates.choose(&mut rng).expect("non-empty");
                let families = relevant(manifest, entities);
                let member_ids: BTreeSet<&str> =
                    families.iter().flat_map(|f| f.contracts.iter().map(|c| c.contract_id.as_str())).collect();
                let outsiders: Vec<String> = all_ids.iter().filter(|id| !member_ids.contains(id.as_str())).cloned().collect();
                let distractors = pick(&outsiders, BASELINE_SHOWN, &mut rng);
                let id = format!("{}/{}/{:02}", task.as_str(), name, i);
                let contracts = by_effective(families.iter().flat_map(|f| f.contracts.iter()).collect());
                if task.needs_clause() {
                    let labels: BTreeSet<ClauseLabel> = contracts.iter().flat_map(|c| c.sections.iter().map(|s| s.label)).collect();
                    let labels: Vec<ClauseLabel> = labels.into_iter().collect();
                    let label = *labels
                        .choose(&mut rng)
                        .ok_or_else(|| Error::InsufficientCorpus(format!("no labelled sections for {name}")))?;
                    let mut sections: Vec<SectionRef> = contracts.iter().filter_map(|c| clause_section(c, label)).collect();
                    if task == Task::CompareClause {
                        sections = sample_indices(sections.len(), COMPARE_SAMPLE).into_iter().map(|k| sections[k].clone()).collect();
                    }
                    let with_clause: Vec<String> = sections.iter().map(|s| s.contract_id.clone()).collect();
                    cases.push(EvalCase {
                        id,
                        query: QuerySpec::new(entities.clone(), task).with_clause(label),
                        kind: CaseKind::Analytical,
                        combo: name.clone(),
                        truth: Vec::new(),
                        truth_sections: sections,
                        reference: None,
                        correct: with_clause.into_iter().take(BASELINE_SHOWN).collect(),
                        distractors,
                    });
                } else {
                    let truth = retrieval_truth(task, &families);
                    let pool: Vec<String> = if task == Task::FindMasterAgreements {
                        truth.clone()
                    } else {
                        contracts.iter().map(|c| c.contract_id.clone()).collect()
                    };
                    let mut correct = pick(&pool, BASELINE_SHOWN, &mut rng);
                    correct.sort();
                    cases.push(EvalCase {
                        id,
                        query: QuerySpec::new(entities.clone(), task),
                        kind: CaseKind::Retrieval,
                        combo: name.clone(),
                        truth,
                        truth_sections: Vec::new(),
                        reference: None,
                        correct,
                        distractors,
                    });
                }
            }
        }
    }
    cases.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(cases)
}

/// Fills analytical references by running the agents over the truth
/// sections in `kb`.
pub fn attach_references(cases: &mut [EvalCase], kb: &KnowledgeBase) -> Result<()> {
    use rayon::prelude::*;
    cases.par_iter_mut().filter(|c| c.kind == CaseKind::Analytical && c.reference.is_none()).try_for_each(|case| {
        let texts: Vec<(String, String)> = case
            .truth_sections
            .iter()
            .map(|r| {
                let doc = kb.doc(&r.contract_id).ok_or_else(|| Error::NotFound(format!("contract {}", r.contract_id)))?;
                let s = doc.sections.get(r.ordinal).ok_or_else(|| Error::NotFound(format!("section {}#{}", r.contract_id, r.ordinal)))?;
                Ok((r.contract_id.clone(), s.body_text.clone()))
            })
            .collect::<Result<_>>()?;
        let reference = if case.query.task == Task::CompareClause {
            let inputs = texts
                .into_iter()
                .map(|(id, text)| ClauseInput {
                    effective_date: kb.features(&id).and_then(|f| f.dates.effective),
                    contract_id: id,
                    text,
                })
                .collect();
            compare_clauses(inputs, kb.budget(), kb.client().as_ref())?.render()
        } else {
            let refs: Vec<&str> = texts.iter().map(|(_, t)| t.as_str()).collect();
            summarize(&refs, kb.budget(), kb.client().as_ref(), 1)?
        };
        case.reference = Some(reference);
        Ok(())
    })
}
