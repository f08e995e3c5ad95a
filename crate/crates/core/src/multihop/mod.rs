//! Multi-hop tools: contract lifecycle (termination date) and amendment →
//! master resolution.

mod duration;
mod master;

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

pub use duration::{
    calendar_add, find_duration, number_words, parse_duration, word_number, Duration, DurationMatch, DurationUnit,
};
pub use master::{resolve_master, resolve_master_link, ContractKind, MasterIndex, MasterLink};

use crate::corpus::{ContractDoc, SectionSpan};
use crate::error::{Error, Result};
use crate::extraction::{find_date_literals, CalendarDate, DateBundle, Evidence};
use crate::labels::ClauseLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LifecycleBasis {
    ExplicitTerminationDate,
    EffectivePlusDuration,
    Evergreen,
}

/// Which part of the contract supplied the lifecycle evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceScope {
    Termination,
    Recitals,
    WholeText,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifecycleResult {
    pub termination: Option<CalendarDate>,
    pub basis: LifecycleBasis,
    pub duration_term: Option<Duration>,
    pub evidence: Option<Evidence>,
    pub scope: Option<EvidenceScope>,
}

impl LifecycleResult {
    /// `DD/MM/YYYY`, or `evergreen`.
    pub fn render(&self) -> String {
        self.termination.map_or_else(|| "evergreen".to_string(), |d| d.to_string())
    }
}

static EXPLICIT_CUE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)(?:\b(?:terminate|expire)s?\s+(?:on|as\s+of)|\b(?:remain|continue)\b[^.;]{0,40}?\buntil|\bexpiration\s+date\s+(?:of|shall\s+be|is))\s+(?:the\s+)?$").unwrap()
});

/// Explicit termination date in `text`: a date literal directly introduced
/// by "terminate on", "remain in effect until" and similar.
fn explicit_date(text: &str, not_before: CalendarDate) -> Option<(CalendarDate, usize, usize)> {
    find_date_literals(text).into_iter().find_map(|lit| {
        let date = lit.date?;
        let from = text[..lit.start].char_indices().rev().take(80).last().map_or(lit.start, |(i, _)| i);
        (EXPLICIT_CUE_RE.is_match(&text[from..lit.start]) && date >= not_before).then_some((date, lit.start, lit.end))
    })
}

fn body_offset(s: &SectionSpan) -> usize {
    s.end_offset - s.body_text.len()
}

/// Computes the termination date. Scopes are searched in order: sections
/// labelled termination, then recitals, then the whole text. Within a scope
/// an explicit date beats a duration.
pub fn compute_lifecycle(doc: &ContractDoc, dates: &DateBundle, sections: &[SectionSpan]) -> Result<LifecycleResult> {
    let effective = dates.effective.ok_or_else(|| Error::NoEffective(doc.contract_id.clone()))?;
    let by_label = |label: ClauseLabel| -> Vec<(&str, usize)> {
        sections
            .iter()
            .filter(|s| s.title_label == label)
            .map(|s| (s.body_text.as_str(), body_offset(s)))
            .collect()
    };
    let scopes = [
        (EvidenceScope::Termination, by_label(ClauseLabel::Termination)),
        (EvidenceScope::Recitals, by_label(ClauseLabel::Recitals)),
        (EvidenceScope::WholeText, vec![(doc.plain_text.as_str(), 0)]),
    ];
    for (scope, texts) in &scopes {
        for &(text, base) in texts {
            if let Some((date, s, e)) = explicit_date(text, effective) {
                return Ok(LifecycleResult {
                    termination: Some(date),
                    basis: LifecycleBasis::ExplicitTerminationDate,
                    duration_term: None,
                    evidence: Some(Evidence { start: base + s, end: base + e, cue: "explicit termination date".into() }),
                    scope: Some(*scope),
                });
            }
        }
        for &(text, base) in texts {
            if let Some(m) = find_duration(text) {
                let Some(termination) = calendar_add(effective, m.duration) else { continue };
                return Ok(LifecycleResult {
                    termination: Some(termination),
                    basis: LifecycleBasis::EffectivePlusDuration,
                    duration_term: Some(m.duration),
                    evidence: Some(Evidence { start: base + m.start, end: base + m.end, cue: "duration".into() }),
                    scope: Some(*scope),
                });
            }
        }
    }
    Ok(LifecycleResult {
        termination: None,
        basis: LifecycleBasis::Evergreen,
        duration_term: None,
        evidence: None,
        scope: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extraction::extract_dates;

    fn labelled(text: &str, labels: &[ClauseLabel]) -> ContractDoc {
        let mut doc = ContractDoc::from_text("c", text);
        for (s, l) in doc.sections.iter_mut().zip(labels) {
            s.title_label = *l;
        }
        doc
    }

    fn lifecycle(doc: &ContractDoc) -> LifecycleResult {
        compute_lifecycle(doc, &extract_dates(doc).unwrap(), &doc.sections).unwrap()
    }

    #[test]
    fn duration_from_termination_section() {
        let doc = labelled(
            "This Agreement is effective as of June 13, 2005.\n\nTERMINATION\n\nThis Agreement shall have an initial term of three (3) years from the Effective Date. Either party may terminate upon sixty (60) days' prior written notice.",
            &[ClauseLabel::Recitals, ClauseLabel::Termination],
        );
        let r = lifecycle(&doc);
        assert_eq!(r.render(), "13/06/2008");
        assert_eq!(r.basis, LifecycleBasis::EffectivePlusDuration);
        assert_eq!(r.scope, Some(EvidenceScope::Termination));
        let ev = r.evidence.unwrap();
        assert_eq!(&doc.plain_text[ev.start..ev.end], "three (3) years");
    }

    #[test]
    fn explicit_beats_duration() {
        let doc = labelled(
            "Effective as of June 13, 2005.\n\nTERMINATION\n\nThe initial term of 2 years notwithstanding, this Agreement shall terminate on December 31, 2015.",
            &[ClauseLabel::Recitals, ClauseLabel::Termination],
        );
        let r = lifecycle(&doc);
        assert_eq!(r.basis, LifecycleBasis::ExplicitTerminationDate);
        assert_eq!(r.render(), "31/12/2015");
    }

    #[test]
    fn evergreen() {
        let doc = labelled(
            "Effective as of June 13, 2005.\n\nTERMINATION\n\nThis Agreement shall remain in effect until terminated by either party upon ninety (90) days' written notice.",
            &[ClauseLabel::Recitals, ClauseLabel::Termination],
        );
        let r = lifecycle(&doc);
        assert_eq!(r.basis, LifecycleBasis::Evergreen);
        assert_eq!(r.termination, None);
        assert_eq!(r.render(), "evergreen");
    }

    #[test]
    fn missing_effective() {
        let doc = ContractDoc::from_text("c", "Dated as of June 13, 2005.");
        let dates = extract_dates(&doc).unwrap();
        assert_eq!(compute_lifecycle(&doc, &dates, &doc.sections).unwrap_err().code(), "E_NO_EFFECTIVE");
    }

    #[test]
    fn explicit_date_before_effective_is_ignored() {
        let doc = labelled(
            "Effective as of June 13, 2005.\n\nTERMINATION\n\nThe prior agreement shall terminate on January 1, 2001.",
            &[ClauseLabel::Recitals, ClauseLabel::Termination],
        );
        assert_eq!(lifecycle(&doc).basis, LifecycleBasis::Evergreen);
    }
}
