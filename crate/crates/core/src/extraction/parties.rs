//! Closed-registry party matching.
//!
//! Names are compared on a normalised form (lowercase, periods and
//! apostrophes dropped, other punctuation treated as a separator, leading
//! article and trailing corporate suffixes removed). Candidate windows are
//! word-aligned runs of text whose normalised length lies within ±20% of the
//! target; a window matches when `1 - edit / max(len)` reaches the
//! threshold. Names are searched longest first and every match is masked
//! before shorter names are tried, so a name that is a substring of a
//! longer matched name is never reported inside it.

use std::collections::{BTreeSet, HashMap, HashSet};

use aho_corasick::AhoCorasick;
use serde::{Deserialize, Serialize};

use crate::corpus::ContractDoc;
use crate::text::levenshtein_within;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartyRole {
    Fund,
    Trust,
    Custodian,
    Other,
}

impl PartyRole {
    pub fn as_str(self) -> &'static str {
        match self {
            PartyRole::Fund => "fund",
            PartyRole::Trust => "trust",
            PartyRole::Custodian => "custodian",
            PartyRole::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "fund" => Some(PartyRole::Fund),
            "trust" => Some(PartyRole::Trust),
            "custodian" => Some(PartyRole::Custodian),
            "other" => Some(PartyRole::Other),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartyRecord {
    pub name: String,
    pub role: PartyRole,
    pub match_score: f64,
    pub start: usize,
    pub end: usize,
}

const SUFFIXES: &[&str] = &["inc", "llc", "na", "ltd", "corp", "co", "plc", "lp"];

/// Tokens of `text` in normalised form with their byte spans.
fn name_tokens(text: &str) -> Vec<(String, usize, usize)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let is_word = |c: char| c.is_alphanumeric() || matches!(c, '.' | '\'' | '\u{2019}');
    let push = |s: usize, e: usize, out: &mut Vec<(String, usize, usize)>| {
        let run = &text[s..e];
        let norm: String = run
            .chars()
            .filter(|c| c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect();
        if norm.is_empty() {
            return;
        }
        let lead = run.find(char::is_alphanumeric).unwrap_or(0);
        // keep the closing period of abbreviations like "N.A." but not a
        // sentence-final one
        let mut end = e;
        if run.ends_with('.') && run.matches('.').count() == 1 {
            end -= 1;
        }
        while end > s + lead && matches!(text[..end].chars().last(), Some('\'') | Some('\u{2019}')) {
            end -= text[..end].chars().last().unwrap().len_utf8();
        }
        out.push((norm, s + lead, end));
    };
    for (i, c) in text.char_indices() {
        match (is_word(c), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                push(s, i, &mut out);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        push(s, text.len(), &mut out);
    }
    out
}

fn strip_affixes(tokens: &[String]) -> &[String] {
    let mut lo = 0;
    let mut hi = tokens.len();
    if hi - lo > 1 && tokens[lo] == "the" {
        lo += 1;
    }
    while hi - lo > 1 && SUFFIXES.contains(&tokens[hi - 1].as_str()) {
        hi -= 1;
    }
    &tokens[lo..hi]
}

/// Normalised comparison form of a party name.
pub fn normalize_name(name: &str) -> String {
    let toks: Vec<String> = name_tokens(name).into_iter().map(|t| t.0).collect();
    strip_affixes(&toks).join(" ")
}

/// Role heuristic for registry names taken from filing metadata.
pub fn infer_role(name: &str) -> PartyRole {
    let n = normalize_name(name);
    let words: Vec<&str> = n.split(' ').collect();
    let has = |w: &str| words.contains(&w);
    if has("bank") || has("custodian") || n.contains("trust company") || n.contains("brothers harriman") || n.starts_with("citibank") {
        PartyRole::Custodian
    } else if matches!(words.last(), Some(&"fund") | Some(&"portfolio")) {
        PartyRole::Fund
    } else if has("trust") || has("funds") {
        PartyRole::Trust
    } else {
        PartyRole::Other
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegistryEntry {
    pub name: String,
    pub role: PartyRole,
    #[serde(skip)]
    normalized: String,
}

impl RegistryEntry {
    pub fn new(name: impl Into<String>, role: PartyRole) -> Self {
        let name = name.into();
        let normalized = normalize_name(&name);
        Self { name, role, normalized }
    }

    pub fn normalized(&self) -> &str {
        &self.normalized
    }
}

/// The closed universe of party names the matcher may report.
#[derive(Debug, Clone, Default)]
pub struct PartyRegistry {
    entries: Vec<RegistryEntry>,
}

impl PartyRegistry {
    /// Builds a registry; duplicate normalised names keep the first entry.
    pub fn new(entries: impl IntoIterator<Item = (String, PartyRole)>) -> Self {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (name, role) in entries {
            let e = RegistryEntry::new(name, role);
            if !e.normalized.is_empty() && seen.insert(e.normalized.clone()) {
                out.push(e);
            }
        }
        Self { entries: out }
    }

    /// Union of every contract's filing-metadata parties, roles inferred.
    pub fn from_corpus(docs: &[ContractDoc]) -> Self {
        let names: BTreeSet<&str> = docs
            .iter()
            .flat_map(|d| d.metadata_parties.iter().map(String::as_str))
            .collect();
        Self::new(names.into_iter().map(|n| (n.to_string(), infer_role(n))))
    }

    pub fn entries(&self) -> &[RegistryEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Resolves a free-form entity name to a registry entry: exact
    /// normalised match first, otherwise the most similar entry at or above
    /// `threshold` (ties by name).
    pub fn resolve(&self, query: &str, threshold: f64) -> Option<&RegistryEntry> {
        let q = normalize_name(query);
        if q.is_empty() {
            return None;
        }
        if let Some(e) = self.entries.iter().find(|e| e.normalized == q) {
            return Some(e);
        }
        self.entries
            .iter()
            .map(|e| (crate::text::similarity(&e.normalized, &q), e))
            .filter(|(s, _)| *s >= threshold)
            .max_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.name.cmp(&a.1.name)))
            .map(|(_, e)| e)
    }
}

struct Stream {
    tokens: Vec<(String, usize, usize)>,
    /// char offset of each token in the space-joined stream
    offsets: Vec<usize>,
    text: String,
}

impl Stream {
    fn new(text: &str) -> Self {
        let tokens = name_tokens(text);
        let mut offsets = Vec::with_capacity(tokens.len());
        let mut joined = String::new();
        let mut pos = 0;
        for (i, (t, _, _)) in tokens.iter().enumerate() {
            if i > 0 {
                joined.push(' ');
                pos += 1;
            }
            offsets.push(pos);
            joined.push_str(t);
            pos += t.chars().count();
        }
        Self { tokens, offsets, text: joined }
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    score: f64,
    first: usize,
    last: usize,
}

/// Finds registry parties in the contract text. At most one record per
/// registry name is emitted (its best occurrence); all accepted occurrences
/// are masked for the shorter names that follow.
pub fn extract_parties(doc: &ContractDoc, registry: &PartyRegistry, threshold: f64) -> Vec<PartyRecord> {
    if registry.is_empty() {
        return Vec::new();
    }
    let stream = Stream::new(&doc.plain_text);
    if stream.tokens.is_empty() {
        return Vec::new();
    }
    let slack = 1.0 - threshold;

    // Partition filter: if edit(w, t) <= k then one of k+1 pieces of t occurs
    // verbatim in w near its original offset.
    struct Target {
        chars: Vec<char>,
        k: usize,
    }
    let targets: Vec<Target> = registry
        .entries
        .iter()
        .map(|e| {
            let chars: Vec<char> = e.normalized.chars().collect();
            let max_len = (chars.len() as f64 * 1.2).floor();
            let k = (slack * max_len + 1e-9).floor() as usize;
            Target { chars, k }
        })
        .collect();
    let mut piece_owners: HashMap<String, Vec<(usize, usize)>> = HashMap::new();
    for (ti, t) in targets.iter().enumerate() {
        let parts = (t.k + 1).min(t.chars.len().max(1));
        let len = t.chars.len();
        for p in 0..parts {
            let lo = p * len / parts;
            let hi = (p + 1) * len / parts;
            if hi > lo {
                let piece: String = t.chars[lo..hi].iter().collect();
                piece_owners.entry(piece).or_default().push((ti, lo));
            }
        }
    }
    let pieces: Vec<&String> = piece_owners.keys().collect();
    let ac = AhoCorasick::new(pieces.iter().map(|s| s.as_str())).expect("aho-corasick build");

    // byte offset in stream text -> char offset (stream is ASCII in practice, but be exact)
    let char_at: Vec<usize> = {
        let mut v = vec![0; stream.text.len() + 1];
        let mut c = 0;
        for (b, ch) in stream.text.char_indices() {
            v[b] = c;
            for k in 1..ch.len_utf8() {
                v[b + k] = c;
            }
            c += 1;
        }
        v[stream.text.len()] = c;
        v
    };

    let mut starts: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); targets.len()];
    for m in ac.find_overlapping_iter(&stream.text) {
        let s = char_at[m.start()];
        for &(ti, offset) in &piece_owners[pieces[m.pattern().as_usize()]] {
            let k = targets[ti].k;
            let lo = s.saturating_sub(offset + k + 4);
            let hi = (s + k).saturating_sub(offset);
            let first_tok = stream.offsets.partition_point(|&o| o < lo);
            for tok in first_tok..stream.tokens.len() {
                if stream.offsets[tok] > hi {
                    break;
                }
                starts[ti].insert(tok);
            }
        }
    }

    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&a, &b| {
        targets[b]
            .chars
            .len()
            .cmp(&targets[a].chars.len())
            .then_with(|| registry.entries[a].name.cmp(&registry.entries[b].name))
    });

    let mut masked = vec![false; stream.tokens.len()];
    let mut records = Vec::new();
    for ti in order {
        let target = &targets[ti];
        let tlen = target.chars.len();
        if tlen == 0 {
            continue;
        }
        let min_len = (tlen as f64 * 0.8).ceil() as usize;
        let max_len = (tlen as f64 * 1.2).floor() as usize;
        let mut cands = Vec::new();
        for &first in &starts[ti] {
            if masked[first] {
                continue;
            }
            let mut window: Vec<String> = Vec::new();
            for last in first..stream.tokens.len() {
                if masked[last] {
                    break;
                }
                window.push(stream.tokens[last].0.clone());
                let core = strip_affixes(&window);
                let joined: Vec<char> = core.join(" ").chars().collect();
                let last_is_suffix = SUFFIXES.contains(&stream.tokens[last].0.as_str());
                if joined.len() > max_len && !last_is_suffix {
                    break;
                }
                if joined.len() < min_len || joined.len() > max_len {
                    continue;
                }
                let longest = joined.len().max(tlen);
                let k = (slack * longest as f64 + 1e-9).floor() as usize;
                if let Some(d) = levenshtein_within(&joined, &target.chars, k) {
                    let score = 1.0 - d as f64 / longest as f64;
                    if score >= threshold {
                        cands.push(Candidate { score, first, last });
                    }
                }
            }
        }
        if cands.is_empty() {
            continue;
        }
        cands.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| (a.last - a.first).cmp(&(b.last - b.first)))
                .then_with(|| a.first.cmp(&b.first))
        });
        let mut chosen: Vec<Candidate> = Vec::new();
        for c in cands {
            if chosen.iter().all(|o| c.last < o.first || c.first > o.last) {
                chosen.push(c);
            }
        }
        for c in &chosen {
            masked[c.first..=c.last].iter_mut().for_each(|m| *m = true);
        }
        let best = &chosen[0];
        let entry = &registry.entries[ti];
        records.push(PartyRecord {
            name: entry.name.clone(),
            role: entry.role,
            match_score: best.score,
            start: stream.tokens[best.first].1,
            end: stream.tokens[best.last].2,
        });
    }
    records.sort_by_key(|r| r.start);
    records
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(text: &str) -> ContractDoc {
        ContractDoc::from_text("t", text)
    }

    #[test]
    fn normalization_rules() {
        assert_eq!(normalize_name("B.N.Y. MELLON international equity income fund"), "bny mellon international equity income fund");
        assert_eq!(normalize_name("Citibank, N.A."), "citibank");
        assert_eq!(normalize_name("The Bank of New York Mellon"), "bank of new york mellon");
        assert_eq!(normalize_name("Acme Holdings, Inc."), "acme holdings");
    }

    #[test]
    fn exact_name_scores_one() {
        let reg = PartyRegistry::new([("BNY Mellon International Equity Income Fund".to_string(), PartyRole::Fund)]);
        let text = "on behalf of BNY Mellon International Equity Income Fund (the \"Fund\"), and";
        let recs = extract_parties(&doc(text), &reg, 0.9);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].match_score, 1.0);
        assert_eq!(&text[recs[0].start..recs[0].end], "BNY Mellon International Equity Income Fund");
    }

    #[test]
    fn stylistic_variant_matches() {
        let reg = PartyRegistry::new([("BNY Mellon International Equity Income Fund".to_string(), PartyRole::Fund)]);
        let recs = extract_parties(&doc("for B.N.Y. MELLON international equity income fund."), &reg, 0.9);
        assert_eq!(recs.len(), 1);
        assert!(recs[0].match_score >= 0.9);
    }

    #[test]
    fn typo_within_threshold() {
        let reg = PartyRegistry::new([("Alpha Growth Opportunities Fund".to_string(), PartyRole::Fund)]);
        let recs = extract_parties(&doc("and Alpha Growth Oportunities Fund hereby"), &reg, 0.9);
        assert_eq!(recs.len(), 1);
        assert!(recs[0].match_score < 1.0 && recs[0].match_score >= 0.9);
    }

    #[test]
    fn longer_name_masks_its_substring() {
        // Hand trace: "state street bank and trust" (27 chars) is searched first and
        // matches exactly; its tokens are masked, so "state street bank" (17 chars)
        // has no unmasked window left.
        let reg = PartyRegistry::new([
            ("State Street Bank".to_string(), PartyRole::Custodian),
            ("State Street Bank and Trust".to_string(), PartyRole::Custodian),
        ]);
        let recs = extract_parties(&doc("with State Street Bank and Trust as custodian"), &reg, 0.9);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].name, "State Street Bank and Trust");
    }

    #[test]
    fn no_match_yields_empty() {
        let reg = PartyRegistry::new([("Omega Fund".to_string(), PartyRole::Fund)]);
        assert!(extract_parties(&doc("nothing relevant here"), &reg, 0.9).is_empty());
    }

    #[test]
    fn roles_inferred() {
        assert_eq!(infer_role("State Street Bank and Trust Company"), PartyRole::Custodian);
        assert_eq!(infer_role("The Northern Trust Company"), PartyRole::Custodian);
        assert_eq!(infer_role("Citibank, N.A."), PartyRole::Custodian);
        assert_eq!(infer_role("BNY Mellon Funds Trust"), PartyRole::Trust);
        assert_eq!(infer_role("Harbor Series Trust"), PartyRole::Trust);
        assert_eq!(infer_role("BNY Mellon International Equity Income Fund"), PartyRole::Fund);
    }

    #[test]
    fn resolve_prefers_exact() {
        let reg = PartyRegistry::new([
            ("Alpha Fund".to_string(), PartyRole::Fund),
            ("Alpha Funds".to_string(), PartyRole::Trust),
        ]);
        assert_eq!(reg.resolve("ALPHA FUND", 0.9).unwrap().name, "Alpha Fund");
        assert!(reg.resolve("Nonexistent Fund", 0.9).is_none());
    }
}
