//! Heading detection and section spans.

use std::sync::LazyLock;

use regex::Regex;

use super::{ContractDoc, SectionSpan};
use crate::labels::ClauseLabel;

/// Which detector recognised a heading. Earlier variants take priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HeadingKind {
    Article,
    Numbered,
    Caps,
    Title,
}

static ARTICLE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(?:ARTICLE|Article)\s+(?:[IVXLCDM]+|\d{1,3})\.?(?:\s*[-:\x{2013}\x{2014}]?\s*(.+))?$").unwrap()
});
static NUMBERED_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^(?:(?:SECTION|Section)\s+)?\d{1,2}(?:\.\d{1,2})*\.?\s+(\S.*)$").unwrap()
});

const SMALL_WORDS: &[&str] = &[
    "a", "an", "and", "as", "at", "by", "for", "from", "in", "into", "of", "on", "or", "the", "to",
    "under", "upon", "with", "and/or",
];

struct Paragraph<'a> {
    start: usize,
    end: usize,
    lines: Vec<&'a str>,
}

fn paragraphs(text: &str) -> Vec<Paragraph<'_>> {
    let mut out: Vec<Paragraph> = Vec::new();
    let mut current: Option<Paragraph> = None;
    let mut pos = 0;
    for line in text.split('\n') {
        let line_start = pos;
        pos += line.len() + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            if let Some(p) = current.take() {
                out.push(p);
            }
            continue;
        }
        let lead = line.len() - line.trim_start().len();
        let start = line_start + lead;
        let end = start + trimmed.len();
        match current.as_mut() {
            Some(p) => {
                p.end = end;
                p.lines.push(trimmed);
            }
            None => current = Some(Paragraph { start, end, lines: vec![trimmed] }),
        }
    }
    out.extend(current);
    out
}

fn word_count(s: &str) -> usize {
    s.split_whitespace().count()
}

fn is_title_words(s: &str) -> bool {
    let mut saw_cap = false;
    for (i, word) in s.split_whitespace().enumerate() {
        let core = word.trim_start_matches(|c: char| !c.is_alphanumeric());
        let Some(first) = core.chars().next() else { continue };
        if !first.is_alphabetic() {
            continue;
        }
        if first.is_uppercase() {
            saw_cap = true;
        } else if i == 0 || !SMALL_WORDS.contains(&core.trim_end_matches(|c: char| !c.is_alphanumeric() && c != '/')) {
            return false;
        }
    }
    saw_cap
}

fn is_all_caps(s: &str) -> bool {
    let letters = s.chars().filter(|c| c.is_alphabetic()).count();
    letters >= 2 && s.chars().filter(|c| c.is_alphabetic()).all(|c| c.is_uppercase())
}

fn ends_like_text(s: &str) -> bool {
    s.ends_with([',', ';', ':'])
}

fn strong_heading(p: &Paragraph) -> Option<HeadingKind> {
    if p.lines.len() <= 2 {
        if let Some(c) = ARTICLE_RE.captures(p.lines[0]) {
            let inline = c.get(1).map_or("", |m| m.as_str());
            let ok = match p.lines.len() {
                1 => word_count(inline) <= 10,
                _ => inline.is_empty() && word_count(p.lines[1]) <= 10 && !ends_like_text(p.lines[1]),
            };
            if ok {
                return Some(HeadingKind::Article);
            }
        }
    }
    if p.lines.len() != 1 {
        return None;
    }
    let line = p.lines[0];
    if word_count(line) <= 12 {
        if let Some(c) = NUMBERED_RE.captures(line) {
            let title = c.get(1).unwrap().as_str();
            if word_count(title) <= 10 && !ends_like_text(title) && is_title_words(title) {
                return Some(HeadingKind::Numbered);
            }
        }
    }
    if word_count(line) <= 8 && is_all_caps(line) && !ends_like_text(line) {
        return Some(HeadingKind::Caps);
    }
    None
}

fn title_shaped(p: &Paragraph) -> bool {
    p.lines.len() == 1
        && word_count(p.lines[0]) <= 8
        && !p.lines[0].ends_with(['.', ':', ';', ',', '?', '!'])
        && is_title_words(p.lines[0])
}

fn heading_kind(paras: &[Paragraph], i: usize) -> Option<HeadingKind> {
    if let Some(kind) = strong_heading(&paras[i]) {
        return Some(kind);
    }
    let next = paras.get(i + 1)?;
    (title_shaped(&paras[i]) && strong_heading(next).is_none() && !title_shaped(next)).then_some(HeadingKind::Title)
}

/// Splits a document's plain text into sections. Text before the first
/// heading becomes a section with an empty heading; a document without any
/// heading is a single section.
pub fn sectionize(doc: &ContractDoc) -> Vec<SectionSpan> {
    let text = &doc.plain_text;
    let paras = paragraphs(text);
    if paras.is_empty() {
        return Vec::new();
    }
    let heads: Vec<usize> = (0..paras.len()).filter(|&i| heading_kind(&paras, i).is_some()).collect();
    let mut groups: Vec<(Option<usize>, usize, usize)> = Vec::new();
    let first = heads.first().copied().unwrap_or(paras.len());
    if first > 0 {
        groups.push((None, 0, first));
    }
    for (k, &h) in heads.iter().enumerate() {
        let stop = heads.get(k + 1).copied().unwrap_or(paras.len());
        groups.push((Some(h), h + 1, stop));
    }
    groups
        .into_iter()
        .enumerate()
        .map(|(ordinal, (head, body_from, body_to))| {
            let heading_text = head.map(|h| paras[h].lines.join(" ")).unwrap_or_default();
            let start = head.map_or(paras[body_from].start, |h| paras[h].start);
            let end = if body_to > body_from { paras[body_to - 1].end } else { paras[head.unwrap()].end };
            let body_text = if body_to > body_from { text[paras[body_from].start..end].to_string() } else { String::new() };
            SectionSpan {
                contract_id: doc.contract_id.clone(),
                ordinal,
                heading_text,
                title_label: ClauseLabel::Unknown,
                label_score: 0.0,
                body_text,
                start_offset: start,
                end_offset: end,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn headings(text: &str) -> Vec<String> {
        sectionize(&ContractDoc::from_text("c", text)).into_iter().map(|s| s.heading_text).collect()
    }

    #[test]
    fn article_headings() {
        let text = "ARTICLE I\nDEFINITIONS\n\nTerms used herein have the meanings given below in this agreement.\n\nARTICLE II\nDUTIES OF THE CUSTODIAN\n\nThe Custodian shall hold all securities delivered to it by the Fund.";
        let secs = sectionize(&ContractDoc::from_text("c", text));
        assert_eq!(secs.len(), 2);
        assert_eq!(secs[0].heading_text, "ARTICLE I DEFINITIONS");
        assert_eq!(secs[1].heading_text, "ARTICLE II DUTIES OF THE CUSTODIAN");
        assert_eq!(secs[1].body_text, "The Custodian shall hold all securities delivered to it by the Fund.");
        assert_eq!(&text[secs[1].start_offset..secs[1].end_offset], &text[text.find("ARTICLE II").unwrap()..]);
    }

    #[test]
    fn numbered_caps_and_title() {
        let text = "Preamble text that is long enough to be a paragraph of its own here.\n\n4. Indemnification\n\nThe Fund shall indemnify the Custodian against all losses.\n\nGOVERNING LAW\n\nThis Agreement is governed by the laws of New York.\n\nFee Schedule\n\nDomestic custody: 0.01% per annum\nTransaction charge: $15";
        assert_eq!(headings(text), vec!["", "4. Indemnification", "GOVERNING LAW", "Fee Schedule"]);
    }

    #[test]
    fn no_headings_single_section() {
        let secs = sectionize(&ContractDoc::from_text("c", "just some words in a sentence that is not a heading."));
        assert_eq!(secs.len(), 1);
        assert_eq!(secs[0].heading_text, "");
        assert!(sectionize(&ContractDoc::from_text("c", "")).is_empty());
    }

    #[test]
    fn body_paragraphs_not_headings() {
        let text = "1. The Fund shall pay the Custodian the fees set forth in the schedule attached hereto, as amended.\n\nIN WITNESS WHEREOF, the parties have executed this Agreement.\n\nBy: /s/ Jane Doe\nName: Jane Doe\nTitle: President";
        assert_eq!(headings(text), vec![""]);
    }

    #[test]
    fn spans_ordered_and_disjoint() {
        let text = "TITLE ONE\n\nbody one is here.\n\nTITLE TWO\n\nbody two is here.";
        let secs = sectionize(&ContractDoc::from_text("c", text));
        for w in secs.windows(2) {
            assert!(w[0].end_offset <= w[1].start_offset);
        }
        for s in &secs {
            assert!(s.start_offset < s.end_offset);
        }
    }
}
