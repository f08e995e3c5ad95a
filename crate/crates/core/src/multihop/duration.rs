//! Duration phrases ("three (3) years", "thirty-six months") and calendar
//! arithmetic.

use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::extraction::CalendarDate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DurationUnit {
    Years,
    Months,
    Days,
}

impl DurationUnit {
    pub fn as_str(self) -> &'static str {
        match self {
            DurationUnit::Years => "years",
            DurationUnit::Months => "months",
            DurationUnit::Days => "days",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Duration {
    pub count: u32,
    pub unit: DurationUnit,
}

impl Duration {
    pub fn new(count: u32, unit: DurationUnit) -> Self {
        Self { count, unit }
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.count, self.unit.as_str())
    }
}

/// A duration found in text, with its byte span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DurationMatch {
    pub duration: Duration,
    pub start: usize,
    pub end: usize,
}

const UNITS: [&str; 20] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
    "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
];
const TENS: [&str; 8] = ["twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"];

/// Value of an English number word in 1..=99 ("seven", "thirty-six").
pub fn word_number(s: &str) -> Option<u32> {
    let s = s.to_ascii_lowercase();
    if let Some(i) = UNITS.iter().position(|w| *w == s) {
        return (i > 0).then_some(i as u32);
    }
    let mut parts = s.split(['-', ' ']).filter(|p| !p.is_empty());
    let tens = parts.next()?;
    let t = TENS.iter().position(|w| *w == tens)? as u32 * 10 + 20;
    match parts.next() {
        None => Some(t),
        Some(unit) => {
            let u = UNITS[1..10].iter().position(|w| *w == unit)? as u32 + 1;
            parts.next().is_none().then_some(t + u)
        }
    }
}

/// Renders 1..=99 as words; other values as digits.
pub fn number_words(n: u32) -> String {
    match n {
        1..=19 => UNITS[n as usize].to_string(),
        20..=99 if n % 10 == 0 => TENS[(n / 10 - 2) as usize].to_string(),
        21..=99 => format!("{}-{}", TENS[(n / 10 - 2) as usize], UNITS[(n % 10) as usize]),
        _ => n.to_string(),
    }
}

static PHRASE_RE: LazyLock<Regex> = LazyLock::new(|| {
    let tens = TENS.join("|");
    let units = UNITS[1..].iter().rev().copied().collect::<Vec<_>>().join("|");
    let word = format!(r"(?:(?:{tens})(?:[-\s](?:one|two|three|four|five|six|seven|eight|nine))?|{units})");
    Regex::new(&format!(
        r"(?i)\b(?:(?P<digits>\d{{1,3}})|(?P<word>{word}))(?:\s*\((?P<paren>\d{{1,3}})\))?[\s-]+(?P<unit>years?|months?|days?)\b"
    ))
    .unwrap()
});

/// Phrases that make a following duration the contract term.
static TERM_CUE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)(?:\b(?:term|period)\s+of|\bextended\s+(?:for|by)|\b(?:continue|remain)\b[^.;]{0,40}?\bfor)\s+(?:(?:an?|the)\s+)?(?:(?:additional|further|initial)\s+)?(?:period\s+of\s+)?$").unwrap()
});

/// Phrases that mark a duration as a notice period or deadline instead.
static REJECT_BEFORE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(?:within|after|following|before|prior\s+to|at\s+least|not\s+less\s+than|no\s+less\s+than|not\s+more\s+than|upon|on|giving|give|with)\s+(?:(?:an?|the)\s+)?$").unwrap()
});
static REJECT_AFTER_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^(?:['\x{2019}]s?)?\s*(?:(?:prior|advance|written)\s+)*notice|^\s+(?:after|following|of\s+receipt|prior)").unwrap());

fn classify(text: &str, start: usize, end: usize) -> (bool, bool) {
    let before_from = text[..start]
        .char_indices()
        .rev()
        .take(60)
        .last()
        .map_or(start, |(i, _)| i);
    let before = &text[before_from..start];
    let after_to = text[end..].char_indices().nth(40).map_or(text.len(), |(i, _)| end + i);
    let after = &text[end..after_to];
    let cued = TERM_CUE_RE.is_match(before);
    let rejected = REJECT_AFTER_RE.is_match(after) || (!cued && REJECT_BEFORE_RE.is_match(before));
    (cued, rejected)
}

fn unit_of(s: &str) -> DurationUnit {
    match s.to_ascii_lowercase().chars().next() {
        Some('y') => DurationUnit::Years,
        Some('m') => DurationUnit::Months,
        _ => DurationUnit::Days,
    }
}

/// Finds the contract-term duration in `text`. A duration introduced by a
/// term phrase ("term of", "period of", "extended for") is preferred;
/// otherwise the first duration that is not a notice period or deadline.
pub fn find_duration(text: &str) -> Option<DurationMatch> {
    let mut fallback = None;
    for caps in PHRASE_RE.captures_iter(text) {
        let whole = caps.get(0).unwrap();
        let stated = match (caps.name("digits"), caps.name("word")) {
            (Some(d), _) => d.as_str().parse::<u32>().ok(),
            (None, Some(w)) => word_number(w.as_str()),
            _ => None,
        };
        let paren = caps.name("paren").and_then(|p| p.as_str().parse::<u32>().ok());
        let Some(count) = paren.or(stated).filter(|c| *c > 0) else { continue };
        let m = DurationMatch {
            duration: Duration::new(count, unit_of(&caps["unit"])),
            start: whole.start(),
            end: whole.end(),
        };
        let (cued, rejected) = classify(text, m.start, m.end);
        if rejected {
            continue;
        }
        if cued {
            return Some(m);
        }
        fallback.get_or_insert(m);
    }
    fallback
}

pub fn parse_duration(text: &str) -> Option<Duration> {
    find_duration(text).map(|m| m.duration)
}

/// Adds a duration with month-end clamping (31 Jan + 1 month → end of
/// February; 29 Feb + 1 year → 28 Feb). `None` when the result leaves the
/// supported year range.
pub fn calendar_add(date: CalendarDate, duration: Duration) -> Option<CalendarDate> {
    let n = i64::from(duration.count);
    match duration.unit {
        DurationUnit::Years => date.add_years(n),
        DurationUnit::Months => date.add_months(n),
        DurationUnit::Days => date.add_days(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(count: u32, unit: DurationUnit) -> Option<Duration> {
        Some(Duration::new(count, unit))
    }

    #[test]
    fn forms() {
        use DurationUnit::*;
        assert_eq!(parse_duration("an initial term of three (3) years"), d(3, Years));
        assert_eq!(parse_duration("term of thirty-six months"), d(36, Months));
        assert_eq!(parse_duration("3 years"), d(3, Years));
        assert_eq!(parse_duration("for a period of one year"), d(1, Years));
        assert_eq!(parse_duration("a term of 180 days"), d(180, Days));
        assert_eq!(parse_duration("a term of two (3) years"), d(3, Years));
        assert_eq!(parse_duration("a term of twenty four months"), d(24, Months));
    }

    #[test]
    fn evergreen_and_notice_periods() {
        assert_eq!(parse_duration("shall remain in effect until terminated by either party"), None);
        assert_eq!(parse_duration("upon sixty (60) days' prior written notice"), None);
        assert_eq!(parse_duration("payable within thirty (30) days of receipt"), None);
        assert_eq!(parse_duration("not less than ninety (90) days written notice"), None);
    }

    #[test]
    fn term_phrase_preferred_over_earlier_bare_duration() {
        let text = "Records are kept 6 years. This Agreement has an initial term of five (5) years.";
        assert_eq!(parse_duration(text), d(5, DurationUnit::Years));
    }

    #[test]
    fn words() {
        assert_eq!(word_number("twenty"), Some(20));
        assert_eq!(word_number("Ninety-Nine"), Some(99));
        assert_eq!(word_number("zero"), None);
        for n in 1..100 {
            assert_eq!(word_number(&number_words(n)), Some(n));
        }
    }

    #[test]
    fn clamped_adds() {
        let add = |s: &str, n, u| calendar_add(s.parse().unwrap(), Duration::new(n, u)).unwrap().to_string();
        assert_eq!(add("13/06/2005", 3, DurationUnit::Years), "13/06/2008");
        assert_eq!(add("29/02/2020", 1, DurationUnit::Years), "28/02/2021");
        assert_eq!(add("31/01/2021", 1, DurationUnit::Months), "28/02/2021");
        assert_eq!(add("31/01/2020", 1, DurationUnit::Months), "29/02/2020");
        assert_eq!(add("30/12/2020", 2, DurationUnit::Days), "01/01/2021");
    }
}
