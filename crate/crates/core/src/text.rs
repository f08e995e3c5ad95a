//! Small text helpers shared by the labeller, the index and the agents.

/// Lowercased alphanumeric terms of length ≥ 2, split on every
/// non-alphanumeric character. This is the tokenizer used by the search
/// index and the keyword labeller.
pub fn index_terms(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() > 1)
        .map(|t| t.to_lowercase())
        .collect()
}

const ABBREVIATIONS: &[&str] = &[
    "no", "co", "inc", "corp", "ltd", "mr", "ms", "mrs", "dr", "sec", "st", "vs", "e.g", "i.e",
    "n.a", "u.s", "u.s.a", "et al", "art", "jan", "feb", "apr", "aug", "sept", "oct", "nov", "dec",
];

/// Splits text into trimmed sentences. Paragraph breaks always end a
/// sentence; otherwise a sentence ends at `.`, `!` or `?` followed by
/// whitespace, unless the period closes a known abbreviation or a single
/// initial.
pub fn sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for para in text.split("\n\n") {
        split_paragraph(para, &mut out);
    }
    out
}

fn split_paragraph<'a>(para: &'a str, out: &mut Vec<&'a str>) {
    let bytes = para.as_bytes();
    let mut start = 0;
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if matches!(b, b'.' | b'!' | b'?') {
            // swallow closing quotes/parens
            let mut end = i + 1;
            while end < bytes.len() && matches!(bytes[end], b'"' | b'\'' | b')') {
                end += 1;
            }
            let at_boundary = end >= bytes.len() || bytes[end].is_ascii_whitespace();
            if at_boundary && !(b == b'.' && is_abbreviation(&para[start..i])) {
                push_trimmed(&para[start..end], out);
                start = end;
                i = end;
                continue;
            }
        }
        i += 1;
    }
    push_trimmed(&para[start..], out);
}

fn push_trimmed<'a>(s: &'a str, out: &mut Vec<&'a str>) {
    let t = s.trim();
    if !t.is_empty() {
        out.push(t);
    }
}

fn is_abbreviation(before: &str) -> bool {
    let word = before
        .rsplit(|c: char| c.is_whitespace() || c == '(' || c == '"')
        .next()
        .unwrap_or("");
    let lower = word.to_ascii_lowercase();
    if lower.chars().count() == 1 && lower.chars().all(|c| c.is_ascii_alphabetic()) {
        return true;
    }
    ABBREVIATIONS.contains(&lower.as_str())
}

/// Levenshtein similarity `1 - distance / max(len)` over chars; `1.0` for two
/// empty strings.
pub fn similarity(a: &str, b: &str) -> f64 {
    let max = a.chars().count().max(b.chars().count());
    if max == 0 {
        return 1.0;
    }
    1.0 - strsim::levenshtein(a, b) as f64 / max as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_terms_drop_single_chars() {
        assert_eq!(
            index_terms("Fees & Expenses; a B-2 rule"),
            vec!["fees", "expenses", "rule"]
        );
    }

    #[test]
    fn sentences_respect_abbreviations_and_paragraphs() {
        let text = "Citibank, N.A. shall act. The Fund pays $5.00 per item!\n\nNew para without stop";
        assert_eq!(
            sentences(text),
            vec![
                "Citibank, N.A. shall act.",
                "The Fund pays $5.00 per item!",
                "New para without stop"
            ]
        );
        assert_eq!(
            sentences("Amendment No. 2 is made. Done."),
            vec!["Amendment No. 2 is made.", "Done."]
        );
    }

    #[test]
    fn similarity_bounds() {
        assert_eq!(similarity("", ""), 1.0);
        assert_eq!(similarity("abc", "abc"), 1.0);
        assert_eq!(similarity("abc", "xyz"), 0.0);
    }
}

/// Levenshtein distance if it is at most `k`, otherwise `None`. Runs in
/// O(k · len) and stops as soon as every cell in a row exceeds `k`.
pub fn levenshtein_within(a: &[char], b: &[char], k: usize) -> Option<usize> {
    let (n, m) = (a.len(), b.len());
    if n.abs_diff(m) > k {
        return None;
    }
    const INF: usize = usize::MAX / 2;
    let mut prev = vec![INF; m + 1];
    let mut cur = vec![INF; m + 1];
    for (j, cell) in prev.iter_mut().enumerate().take(k.min(m) + 1) {
        *cell = j;
    }
    for i in 1..=n {
        let lo = i.saturating_sub(k).max(1);
        let hi = (i + k).min(m);
        cur.fill(INF);
        if i <= k {
            cur[0] = i;
        }
        let mut row_min = cur[0];
        for j in lo..=hi {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let v = (prev[j - 1] + cost).min(prev[j] + 1).min(cur[j - 1] + 1);
            cur[j] = v;
            row_min = row_min.min(v);
        }
        if row_min > k {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    (prev[m] <= k).then_some(prev[m])
}

#[cfg(test)]
mod bounded_tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn bounded_agrees_with_full(a in "[abc ]{0,12}", b in "[abc ]{0,12}", k in 0usize..6) {
            let ac: Vec<char> = a.chars().collect();
            let bc: Vec<char> = b.chars().collect();
            let full = strsim::levenshtein(&a, &b);
            let expected = (full <= k).then_some(full);
            prop_assert_eq!(levenshtein_within(&ac, &bc, k), expected);
        }
    }
}
