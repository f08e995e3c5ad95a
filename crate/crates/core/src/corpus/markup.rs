//! Markup → plain text.
//!
//! Output conventions: one line per `<br>`-separated line, one blank line
//! between block-level elements, runs of whitespace inside a line collapsed
//! to a single space. Input without any tags is treated as plain text, so
//! the function is idempotent on its own output.

const BLOCK_TAGS: &[&str] = &[
    "p", "div", "h1", "h2", "h3", "h4", "h5", "h6", "li", "ul", "ol", "table", "tr", "title",
    "section", "article", "blockquote", "pre", "hr", "center", "body", "html", "dl", "dt", "dd",
    "address", "footer", "header", "document", "type", "text", "page",
];
const SKIP_TAGS: &[&str] = &["script", "style", "head"];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    Line,
    Para,
}

pub fn normalize_markup(raw: &str) -> String {
    let raw = raw.replace("\r\n", "\n").replace('\r', "\n");
    if !looks_like_markup(&raw) {
        return canonicalize_plain(&raw);
    }
    let mut out = String::with_capacity(raw.len());
    let mut breaks: Vec<(usize, Piece)> = Vec::new();
    let bytes = raw.as_bytes();
    let mut i = 0;
    let mut skip_until: Option<String> = None;
    while i < raw.len() {
        let c = bytes[i];
        if c == b'<' {
            if raw[i..].starts_with("<!--") {
                i = raw[i..].find("-->").map_or(raw.len(), |e| i + e + 3);
                continue;
            }
            if let Some((inner_end, next)) = tag_end(&raw, i) {
                let inner = &raw[i + 1..inner_end];
                let (closing, name) = tag_name(inner);
                i = next;
                if let Some(skip) = &skip_until {
                    if closing && name == *skip {
                        skip_until = None;
                    }
                    continue;
                }
                if !closing && SKIP_TAGS.contains(&name.as_str()) && !inner.ends_with('/') {
                    skip_until = Some(name);
                    continue;
                }
                if name == "br" {
                    breaks.push((out.len(), Piece::Line));
                    out.push('\n');
                } else if BLOCK_TAGS.contains(&name.as_str()) {
                    breaks.push((out.len(), Piece::Para));
                    out.push('\n');
                } else if matches!(name.as_str(), "td" | "th") {
                    out.push(' ');
                }
                continue;
            }
        }
        let ch = raw[i..].chars().next().unwrap();
        if skip_until.is_none() {
            if c == b'&' {
                if let Some((decoded, len)) = decode_entity(&raw[i..]) {
                    out.push_str(&decoded);
                    i += len;
                    continue;
                }
            }
            out.push(if ch.is_whitespace() { ' ' } else { ch });
        }
        i += ch.len_utf8();
    }
    assemble(&out, &breaks)
}

fn looks_like_markup(s: &str) -> bool {
    let b = s.as_bytes();
    b.windows(2).any(|w| w[0] == b'<' && (w[1].is_ascii_alphabetic() || w[1] == b'/' || w[1] == b'!'))
}

/// End of the tag body and the resume position for a tag opened at
/// `start`, if the text really looks like a tag.
fn tag_end(s: &str, start: usize) -> Option<(usize, usize)> {
    let next = s.as_bytes().get(start + 1)?;
    if !(next.is_ascii_alphabetic() || *next == b'/' || *next == b'!' || *next == b'?') {
        return None;
    }
    let rest = &s[start + 1..];
    let end = rest.find('>')?;
    // an unclosed tag running into another tag: treat the first '<' as the tag anyway
    if let Some(lt) = rest[..end].find('<') {
        return Some((start + 1 + lt, start + 1 + lt));
    }
    Some((start + 1 + end, start + 2 + end))
}

fn tag_name(inner: &str) -> (bool, String) {
    let inner = inner.trim_start();
    let (closing, body) = match inner.strip_prefix('/') {
        Some(b) => (true, b),
        None => (false, inner),
    };
    let name: String = body
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase();
    (closing, name)
}

fn decode_entity(s: &str) -> Option<(String, usize)> {
    let semi = s[..s.len().min(12)].find(';')?;
    let body = &s[1..semi];
    let decoded = if let Some(num) = body.strip_prefix('#') {
        let code = match num.strip_prefix(['x', 'X']) {
            Some(hex) => u32::from_str_radix(hex, 16).ok()?,
            None => num.parse().ok()?,
        };
        let ch = char::from_u32(code)?;
        if ch == '\u{a0}' { ' ' } else { ch }.to_string()
    } else {
        match body {
            "nbsp" | "ensp" | "emsp" | "thinsp" => " ",
            "amp" => "&",
            "lt" => "<",
            "gt" => ">",
            "quot" => "\"",
            "apos" => "'",
            "rsquo" => "\u{2019}",
            "lsquo" => "\u{2018}",
            "ldquo" => "\u{201c}",
            "rdquo" => "\u{201d}",
            "mdash" => "\u{2014}",
            "ndash" => "\u{2013}",
            "sect" => "\u{a7}",
            "para" => "\u{b6}",
            "copy" => "\u{a9}",
            "reg" => "\u{ae}",
            "bull" => "\u{2022}",
            "hellip" => "\u{2026}",
            _ => return None,
        }
        .to_string()
    };
    Some((decoded, semi + 1))
}

/// Splits the flattened text at the recorded break markers and re-joins it
/// in canonical form.
fn assemble(flat: &str, breaks: &[(usize, Piece)]) -> String {
    let mut paragraphs: Vec<Vec<String>> = vec![Vec::new()];
    let mut last = 0;
    for &(pos, kind) in breaks {
        push_line(&mut paragraphs, &flat[last..pos]);
        last = pos + 1;
        if kind == Piece::Para {
            paragraphs.push(Vec::new());
        }
    }
    push_line(&mut paragraphs, &flat[last..]);
    join(paragraphs)
}

fn push_line(paragraphs: &mut [Vec<String>], segment: &str) {
    let line = segment.split_whitespace().collect::<Vec<_>>().join(" ");
    if !line.is_empty() {
        paragraphs.last_mut().unwrap().push(line);
    }
}

fn join(paragraphs: Vec<Vec<String>>) -> String {
    paragraphs
        .into_iter()
        .filter(|p| !p.is_empty())
        .map(|p| p.join("\n"))
        .collect::<Vec<_>>()
        .join("\n\n")
}

fn canonicalize_plain(s: &str) -> String {
    let mut paragraphs: Vec<Vec<String>> = vec![Vec::new()];
    for line in s.split('\n') {
        let collapsed = line
            .split(|c: char| c.is_whitespace())
            .filter(|w| !w.is_empty())
            .collect::<Vec<_>>()
            .join(" ");
        if collapsed.is_empty() {
            paragraphs.push(Vec::new());
        } else {
            paragraphs.last_mut().unwrap().push(collapsed);
        }
    }
    join(paragraphs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_paragraph() {
        assert_eq!(normalize_markup("<p>Effective as of June 1, 2005</p>"), "Effective as of June 1, 2005");
    }

    #[test]
    fn entity_and_line_break() {
        assert_eq!(
            normalize_markup("<b>ARTICLE&nbsp;III</b><br>Indemnification"),
            "ARTICLE III\nIndemnification"
        );
    }

    #[test]
    fn blocks_become_paragraphs_and_whitespace_collapses() {
        let html = "<html><head><title>ex99</title><style>p{}</style></head><body>\n<p>One\n   two</p><div>Three &amp; four</div><!-- c --><p></p></body></html>";
        assert_eq!(normalize_markup(html), "One two\n\nThree & four");
    }

    #[test]
    fn tolerates_unclosed_tags() {
        assert_eq!(normalize_markup("<p>Alpha <b bold<p>Beta"), "Alpha\n\nBeta");
        assert_eq!(normalize_markup("a < b and c > d <p>x"), "a < b and c > d\n\nx");
    }

    #[test]
    fn plain_text_passthrough() {
        assert_eq!(normalize_markup("Line  one\nLine two\n\n\n\nPara"), "Line one\nLine two\n\nPara");
    }

    proptest! {
        #[test]
        fn idempotent(raw in r#"([a-zA-Z ,.\n]|<p>|</p>|<br>|<b>|</b>|&nbsp;|&amp;|<div class="x">){0,60}"#) {
            let once = normalize_markup(&raw);
            prop_assert_eq!(normalize_markup(&once), once.clone());
        }
    }
}
