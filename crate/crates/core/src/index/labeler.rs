//! Clause labelling: heading alias lookup, then keyword-lexicon scoring.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::corpus::SectionSpan;
use crate::error::{Error, Result};
use crate::labels::ClauseLabel;
use crate::text::index_terms;

/// Assigns one of the clause labels to a section.
pub trait SectionLabeler: Send + Sync {
    /// Returns the label and a confidence in `[0, 1]`; the score is positive
    /// for every label other than `Unknown`.
    fn label(&self, heading: &str, body: &str) -> (ClauseLabel, f64);
}

/// Sections labelled by [`label_section`] carry their label and score.
pub type LabeledSection = SectionSpan;

macro_rules! lexicon_files {
    ($($label:ident => $file:literal),+ $(,)?) => {
        const BUILTIN_LEXICONS: &[(ClauseLabel, &str)] = &[
            $((ClauseLabel::$label, include_str!(concat!("../../data/lexicons/", $file)))),+
        ];
    };
}

lexicon_files! {
    AccountTransactions => "account_transactions.txt",
    AuthorizedPersons => "authorized_persons.txt",
    Definitions => "definitions.txt",
    DutiesAndResponsibilities => "duties_and_responsibilities.txt",
    EvidenceOfAuthority => "evidence_of_authority.txt",
    FeeSchedule => "fee_schedule.txt",
    FeesAndExpenses => "fees_and_expenses.txt",
    ForeignCustodian => "foreign_custodian_and_subcustodian.txt",
    GoverningLaw => "governing_law.txt",
    Indemnification => "indemnification.txt",
    Instructions => "instructions.txt",
    LimitationsOfLiability => "limitations_and_scope_of_use_or_liability.txt",
    Miscellaneous => "miscellaneous.txt",
    Nominees => "nominees.txt",
    ProprietaryInformation => "proprietary_information.txt",
    Recitals => "recitals.txt",
    StandardOfCare => "standard_of_care_liabilities.txt",
    Subcustodians => "subcustodians_and_securities_depositories.txt",
    SuccessorCustodian => "successor_custodian.txt",
    Termination => "termination.txt",
}

const BUILTIN_ALIASES: &str = include_str!("../../data/heading_aliases.txt");

/// Lower-cases a heading, drops numbering ("ARTICLE IV", "Section 3.",
/// "4.") and punctuation.
pub fn normalize_heading(heading: &str) -> String {
    let lowered = heading.to_lowercase();
    let tokens: Vec<&str> = lowered
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .collect();
    let mut i = 0;
    if matches!(tokens.first(), Some(&"article" | &"section")) {
        i = 1;
        if tokens.get(1).is_some_and(|t| t.chars().all(|c| "ivxlcdm".contains(c)) || t.chars().all(|c| c.is_ascii_digit())) {
            i = 2;
        }
    }
    tokens[i..]
        .iter()
        .filter(|t| !t.chars().all(|c| c.is_ascii_digit()))
        .copied()
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_lexicon(text: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let term = parts.next().unwrap().to_lowercase();
        let weight = match parts.next() {
            Some(w) => w.parse::<f64>().map_err(|_| Error::Format(format!("lexicon line {}: bad weight {w:?}", n + 1)))?,
            None => 1.0,
        };
        if weight <= 0.0 {
            return Err(Error::Format(format!("lexicon line {}: weight must be positive", n + 1)));
        }
        out.push((term, weight));
    }
    Ok(out)
}

/// Deterministic labeller backed by heading aliases and per-label keyword
/// lexicons.
#[derive(Debug, Clone)]
pub struct LexiconLabeler {
    aliases: HashMap<String, ClauseLabel>,
    /// term → (label, weight)
    terms: HashMap<String, Vec<(ClauseLabel, f64)>>,
    totals: HashMap<ClauseLabel, f64>,
    threshold: f64,
}

impl Default for LexiconLabeler {
    fn default() -> Self {
        Self::builtin(0.15)
    }
}

impl LexiconLabeler {
    pub fn builtin(threshold: f64) -> Self {
        let lexicons = BUILTIN_LEXICONS
            .iter()
            .map(|(l, text)| (*l, parse_lexicon(text).expect("builtin lexicon")))
            .collect();
        Self::from_parts(parse_aliases(BUILTIN_ALIASES).expect("builtin aliases"), lexicons, threshold)
    }

    /// Loads `heading_aliases.txt` and `lexicons/<label>.txt` from `dir`.
    pub fn from_dir(dir: &Path, threshold: f64) -> Result<Self> {
        let aliases = parse_aliases(&fs::read_to_string(dir.join("heading_aliases.txt"))?)?;
        let mut lexicons = Vec::new();
        for label in ClauseLabel::ALL {
            let path = dir.join("lexicons").join(format!("{}.txt", label.as_str().replace(' ', "_")));
            lexicons.push((label, parse_lexicon(&fs::read_to_string(path)?)?));
        }
        Ok(Self::from_parts(aliases, lexicons, threshold))
    }

    fn from_parts(aliases: HashMap<String, ClauseLabel>, lexicons: Vec<(ClauseLabel, Vec<(String, f64)>)>, threshold: f64) -> Self {
        let mut terms: HashMap<String, Vec<(ClauseLabel, f64)>> = HashMap::new();
        let mut totals = HashMap::new();
        for (label, lex) in lexicons {
            totals.insert(label, lex.iter().map(|(_, w)| w).sum());
            for (term, w) in lex {
                terms.entry(term).or_default().push((label, w));
            }
        }
        let mut aliases = aliases;
        for label in ClauseLabel::ALL {
            aliases.insert(normalize_heading(label.as_str()), label);
        }
        Self { aliases, terms, totals, threshold }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Weighted share of each label's lexicon that occurs in `text`.
    pub fn lexicon_scores(&self, text: &str) -> Vec<(ClauseLabel, f64)> {
        let mut seen = std::collections::HashSet::new();
        let mut hits: HashMap<ClauseLabel, f64> = HashMap::new();
        for term in index_terms(text) {
            if !seen.insert(term.clone()) {
                continue;
            }
            if let Some(entries) = self.terms.get(&term) {
                for (label, w) in entries {
                    *hits.entry(*label).or_default() += w;
                }
            }
        }
        let mut scores: Vec<(ClauseLabel, f64)> = ClauseLabel::ALL
            .iter()
            .map(|l| {
                let total = self.totals.get(l).copied().unwrap_or(0.0);
                let s = if total > 0.0 { hits.get(l).copied().unwrap_or(0.0) / total } else { 0.0 };
                (*l, s)
            })
            .collect();
        scores.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scores
    }
}

fn parse_aliases(text: &str) -> Result<HashMap<String, ClauseLabel>> {
    let mut out = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (alias, label) = line
            .split_once('\t')
            .ok_or_else(|| Error::Format(format!("alias line {}: expected <alias>\\t<label>", n + 1)))?;
        let label: ClauseLabel = label.parse().map_err(Error::Format)?;
        out.insert(normalize_heading(alias), label);
    }
    Ok(out)
}

impl SectionLabeler for LexiconLabeler {
    fn label(&self, heading: &str, body: &str) -> (ClauseLabel, f64) {
        let norm = normalize_heading(heading);
        if let Some(label) = self.aliases.get(&norm) {
            return (*label, 1.0);
        }
        let text = format!("{heading}\n{body}");
        match self.lexicon_scores(&text).first() {
            Some(&(label, score)) if score >= self.threshold && score > 0.0 => (label, score),
            _ => (ClauseLabel::Unknown, 0.0),
        }
    }
}

/// Labels a section with the default lexicon labeller.
pub fn label_section(section: &SectionSpan) -> LabeledSection {
    label_section_with(section, &LexiconLabeler::default())
}

pub fn label_section_with(section: &SectionSpan, labeler: &dyn SectionLabeler) -> LabeledSection {
    let (label, score) = labeler.label(&section.heading_text, &section.body_text);
    SectionSpan { title_label: label, label_score: score, ..section.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(heading: &str, body: &str) -> (ClauseLabel, f64) {
        LexiconLabeler::default().label(heading, body)
    }

    #[test]
    fn exact_heading() {
        assert_eq!(label("INDEMNIFICATION", "x"), (ClauseLabel::Indemnification, 1.0));
        assert_eq!(label("ARTICLE IV INDEMNIFICATION", "x"), (ClauseLabel::Indemnification, 1.0));
        assert_eq!(label("12. Standard of Care; Liabilities", "x").0, ClauseLabel::StandardOfCare);
    }

    #[test]
    fn alias_heading() {
        assert_eq!(label("Fees", "x").0, ClauseLabel::FeesAndExpenses);
        assert_eq!(label("GOVERNING LAW; JURISDICTION", "x").0, ClauseLabel::GoverningLaw);
        assert_eq!(label("AMENDMENT NO. 3 TO CUSTODY AGREEMENT", "x").0, ClauseLabel::Recitals);
    }

    #[test]
    fn body_lexicon() {
        let (l, s) = label("", "The Fund shall hold harmless and indemnify the Custodian against all losses, claims, damages and liabilities, including attorneys' fees.");
        assert_eq!(l, ClauseLabel::Indemnification);
        assert!(s >= 0.15 && s <= 1.0);
    }

    #[test]
    fn lorem_ipsum_is_unknown() {
        assert_eq!(label("", "lorem ipsum dolor sit amet consectetur"), (ClauseLabel::Unknown, 0.0));
    }

    #[test]
    fn heading_normalization() {
        assert_eq!(normalize_heading("ARTICLE XII\u{a0}GOVERNING LAW"), "governing law");
        assert_eq!(normalize_heading("Section 3. Term"), "term");
        assert_eq!(normalize_heading("4.1 Fees"), "fees");
    }

    #[test]
    fn from_dir_matches_builtin() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
        let a = LexiconLabeler::from_dir(&dir, 0.15).unwrap();
        let b = LexiconLabeler::default();
        let text = "Securities may be registered in the name of a nominee or held in bearer form.";
        assert_eq!(a.label("", text), b.label("", text));
    }
}
