//! Date literal spotting and cue-window classification.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::date::CalendarDate;
use crate::corpus::ContractDoc;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DateKind {
    Effective,
    Master,
    Dated,
}

impl DateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DateKind::Effective => "effective",
            DateKind::Master => "master",
            DateKind::Dated => "dated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "effective" => Some(DateKind::Effective),
            "master" => Some(DateKind::Master),
            "dated" => Some(DateKind::Dated),
            _ => None,
        }
    }
}

/// Where a bundle date came from. Offsets are byte offsets into
/// `plain_text`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub start: usize,
    pub end: usize,
    pub cue: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateBundle {
    pub effective: Option<CalendarDate>,
    pub master: Option<CalendarDate>,
    pub dated: Option<CalendarDate>,
    pub evidence: BTreeMap<DateKind, Evidence>,
}

impl DateBundle {
    pub fn get(&self, kind: DateKind) -> Option<CalendarDate> {
        match kind {
            DateKind::Effective => self.effective,
            DateKind::Master => self.master,
            DateKind::Dated => self.dated,
        }
    }

    fn set(&mut self, kind: DateKind, date: CalendarDate, evidence: Evidence) {
        let slot = match kind {
            DateKind::Effective => &mut self.effective,
            DateKind::Master => &mut self.master,
            DateKind::Dated => &mut self.dated,
        };
        *slot = Some(date);
        self.evidence.insert(kind, evidence);
    }

    /// True when effective and master dates are both known and equal.
    pub fn is_master(&self) -> bool {
        matches!((self.effective, self.master), (Some(e), Some(m)) if e == m)
    }
}

/// A date literal found in text. `date` is `None` for ambiguous numeric
/// forms (both fields ≤ 12 and unequal) and impossible calendar dates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DateLiteral {
    pub date: Option<CalendarDate>,
    pub start: usize,
    pub end: usize,
}

/// A classified date literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DateMention {
    pub date: CalendarDate,
    pub kind: Option<DateKind>,
    pub start: usize,
    pub end: usize,
    pub cue: Option<String>,
}

/// Locates and classifies date mentions. The regex implementation is the
/// default; a learned span detector can be plugged in behind this trait.
pub trait DateSpotter: Send + Sync {
    fn spot(&self, text: &str) -> Vec<DateMention>;
}

const MONTHS: &str = "january|february|march|april|may|june|july|august|september|october|november|december|jan|feb|mar|apr|jun|jul|aug|sept|sep|oct|nov|dec";

static LITERAL_RE: LazyLock<Regex> = LazyLock::new(|| {
    let pattern = format!(
        r"(?ix)
        \b(?P<d2>\d{{1,2}})(?:st|nd|rd|th)?\s+day\s+of\s+(?P<m2>{MONTHS})\.?,?\s+(?P<y2>\d{{4}})\b
        | \b(?P<m1>{MONTHS})\.?\s+(?P<d1>\d{{1,2}})(?:st|nd|rd|th)?,?\s+(?P<y1>\d{{4}})\b
        | \b(?P<d3>\d{{1,2}})(?:st|nd|rd|th)?\s+(?P<m3>{MONTHS})\.?,?\s+(?P<y3>\d{{4}})\b
        | \b(?P<a4>\d{{1,2}})/(?P<b4>\d{{1,2}})/(?P<y4>\d{{4}})\b"
    );
    Regex::new(&pattern).expect("date literal regex")
});

fn month_number(name: &str) -> Option<u32> {
    let lower = name.to_ascii_lowercase();
    let key = &lower[..lower.len().min(3)];
    let idx = [
        "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
    ]
    .iter()
    .position(|m| *m == key)?;
    Some(idx as u32 + 1)
}

/// Finds every date literal in the supported formats, in document order.
pub fn find_date_literals(text: &str) -> Vec<DateLiteral> {
    LITERAL_RE
        .captures_iter(text)
        .map(|caps| {
            let whole = caps.get(0).unwrap();
            let num = |name: &str| caps.name(name).and_then(|m| m.as_str().parse::<u32>().ok());
            let year = |name: &str| caps.name(name).and_then(|m| m.as_str().parse::<i32>().ok());
            let date = if let Some(m) = caps.name("m1") {
                month_number(m.as_str())
                    .and_then(|mo| CalendarDate::new(year("y1")?, mo, num("d1")?))
            } else if let Some(m) = caps.name("m2") {
                month_number(m.as_str())
                    .and_then(|mo| CalendarDate::new(year("y2")?, mo, num("d2")?))
            } else if let Some(m) = caps.name("m3") {
                month_number(m.as_str())
                    .and_then(|mo| CalendarDate::new(year("y3")?, mo, num("d3")?))
            } else {
                numeric_date(num("a4"), num("b4"), year("y4"))
            };
            DateLiteral {
                date,
                start: whole.start(),
                end: whole.end(),
            }
        })
        .collect()
}

/// Resolves `A/B/YYYY`: a field above 12 fixes the order; equal fields are
/// unambiguous; anything else is skipped rather than guessed.
fn numeric_date(a: Option<u32>, b: Option<u32>, y: Option<i32>) -> Option<CalendarDate> {
    let (a, b, y) = (a?, b?, y?);
    match (a > 12, b > 12) {
        (true, true) => None,
        (true, false) => CalendarDate::new(y, b, a),
        (false, true) => CalendarDate::new(y, a, b),
        (false, false) if a == b => CalendarDate::new(y, a, b),
        (false, false) => None,
    }
}

#[derive(Clone, Copy)]
enum CueTarget {
    Kind(DateKind),
    /// Termination/expiry phrasing: the date is not one of the three kinds.
    Blocker,
}

struct Cue {
    target: CueTarget,
    re: Regex,
}

static CUES: LazyLock<Vec<Cue>> = LazyLock::new(|| {
    let cue = |target, pattern: &str| Cue {
        target,
        re: Regex::new(pattern).expect("cue regex"),
    };
    // Order encodes priority when two cues end at the same offset.
    vec![
        cue(
            CueTarget::Kind(DateKind::Master),
            r"(?i)\b(?:the|that\s+certain|said|such|original)\s+(?:[a-z]+\s+){0,4}?agreement,?\s+(?:\([^)]{0,40}\)\s+)?dated(?:\s+as\s+of)?",
        ),
        cue(
            CueTarget::Kind(DateKind::Effective),
            r"(?i)\beffective\s+(?:as\s+of|on|from)|\bshall\s+become\s+effective|\bbecomes?\s+effective",
        ),
        cue(
            CueTarget::Kind(DateKind::Dated),
            r"(?i)\bdated(?:\s+as\s+of)?|\bmade\b[^.;]{0,80}?\bthis|\bentered\s+into\s+(?:as\s+of|on)",
        ),
        cue(
            CueTarget::Blocker,
            r"(?i)\bterminat\w*|\bexpir\w*|\buntil\b|\bthrough\b|\bno\s+later\s+than",
        ),
    ]
});

/// Default spotter: a literal takes the kind of the nearest cue phrase in
/// the window preceding it. The window never reaches back past the previous
/// literal.
#[derive(Debug, Clone)]
pub struct RegexDateSpotter {
    pub window: usize,
}

impl Default for RegexDateSpotter {
    fn default() -> Self {
        Self { window: 120 }
    }
}

impl DateSpotter for RegexDateSpotter {
    fn spot(&self, text: &str) -> Vec<DateMention> {
        let mut out = Vec::new();
        let mut prev_end = 0;
        for lit in find_date_literals(text) {
            let mut from = lit.start.saturating_sub(self.window).max(prev_end);
            while !text.is_char_boundary(from) {
                from += 1;
            }
            prev_end = lit.end;
            let Some(date) = lit.date else { continue };
            let window = &text[from..lit.start];
            let mut best: Option<(usize, usize, CueTarget, &str)> = None;
            for (priority, cue) in CUES.iter().enumerate() {
                if let Some(m) = cue.re.find_iter(window).last() {
                    let better = match best {
                        None => true,
                        Some((end, prio, _, _)) => m.end() > end || (m.end() == end && priority < prio),
                    };
                    if better {
                        best = Some((m.end(), priority, cue.target, m.as_str()));
                    }
                }
            }
            let (kind, cue) = match best {
                Some((_, _, CueTarget::Kind(kind), cue)) => (Some(kind), Some(collapse_ws(cue))),
                _ => (None, None),
            };
            out.push(DateMention {
                date,
                kind,
                start: lit.start,
                end: lit.end,
                cue,
            });
        }
        out
    }
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn extract_dates(doc: &ContractDoc) -> Result<DateBundle> {
    extract_dates_with(doc, &RegexDateSpotter::default())
}

/// Builds the date bundle: first classified mention per kind wins; when an
/// effective date exists but no master reference does, the document is its
/// own master.
pub fn extract_dates_with(doc: &ContractDoc, spotter: &dyn DateSpotter) -> Result<DateBundle> {
    let mentions = spotter.spot(&doc.plain_text);
    if mentions.is_empty() && find_date_literals(&doc.plain_text).is_empty() {
        return Err(Error::NoDate(doc.contract_id.clone()));
    }
    let mut bundle = DateBundle::default();
    for m in &mentions {
        let Some(kind) = m.kind else { continue };
        if bundle.get(kind).is_none() {
            let evidence = Evidence {
                start: m.start,
                end: m.end,
                cue: m.cue.clone().unwrap_or_default(),
            };
            bundle.set(kind, m.date, evidence);
        }
    }
    if bundle.master.is_none() {
        if let (Some(eff), Some(ev)) = (bundle.effective, bundle.evidence.get(&DateKind::Effective)) {
            let ev = Evidence {
                cue: format!("{} (no master reference)", ev.cue),
                ..ev.clone()
            };
            bundle.set(DateKind::Master, eff, ev);
        }
    }
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(text: &str) -> ContractDoc {
        ContractDoc::from_text("t", text)
    }

    fn date(s: &str) -> Option<CalendarDate> {
        Some(s.parse().unwrap())
    }

    #[test]
    fn effective_day_of_form() {
        let b = extract_dates(&doc("This Agreement is effective as of the 13th day of June, 2005.")).unwrap();
        assert_eq!(b.effective, date("13/06/2005"));
        assert_eq!(b.master, date("13/06/2005"));
        assert!(b.is_master());
        assert_eq!(b.evidence[&DateKind::Effective].cue, "effective as of");
    }

    #[test]
    fn amendment_dated_and_master_reference() {
        let text = "This Amendment dated as of March 1, 2010 to the Custody Agreement dated June 13, 2005 between the parties.";
        let b = extract_dates(&doc(text)).unwrap();
        assert_eq!(b.dated, date("01/03/2010"));
        assert_eq!(b.master, date("13/06/2005"));
        assert_eq!(b.effective, None);
    }

    #[test]
    fn made_this_and_nearest_cue() {
        let text = "This Custody Agreement is made this 1st day of June, 2005, and shall become effective as of June 13, 2005.";
        let b = extract_dates(&doc(text)).unwrap();
        assert_eq!(b.dated, date("01/06/2005"));
        assert_eq!(b.effective, date("13/06/2005"));
    }

    #[test]
    fn termination_dates_are_not_effective() {
        let text = "This Agreement shall become effective upon execution and shall terminate on December 31, 2015.";
        let err = extract_dates(&doc(text)).unwrap();
        assert_eq!(err.effective, None);
    }

    #[test]
    fn formats() {
        let lits: Vec<_> = find_date_literals(
            "June 1, 2005; 2 March 2011; 25/12/2010; 12/25/2010; 03/04/2005; 07/07/2007; Sept. 9, 1999",
        )
        .into_iter()
        .map(|l| l.date.map(|d| d.to_string()))
        .collect();
        assert_eq!(
            lits,
            vec![
                Some("01/06/2005".into()),
                Some("02/03/2011".into()),
                Some("25/12/2010".into()),
                Some("25/12/2010".into()),
                None,
                Some("07/07/2007".into()),
                Some("09/09/1999".into()),
            ]
        );
    }

    #[test]
    fn ambiguous_numeric_is_skipped() {
        let b = extract_dates(&doc("effective as of 03/04/2005")).unwrap();
        assert_eq!(b, DateBundle::default());
    }

    #[test]
    fn no_literal_is_an_error() {
        let err = extract_dates(&doc("A memo without any dates.")).unwrap_err();
        assert_eq!(err.code(), "E_NO_DATE");
    }

    #[test]
    fn first_occurrence_wins() {
        let text = "effective as of May 1, 2001. Later text: effective as of May 1, 2002.";
        let b = extract_dates(&doc(text)).unwrap();
        assert_eq!(b.effective, date("01/05/2001"));
    }
}
