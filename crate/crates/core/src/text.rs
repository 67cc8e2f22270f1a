//! String and DOI normalization.

use std::sync::LazyLock;

use regex::Regex;
use unicode_normalization::UnicodeNormalization;

use crate::error::MalformedDoi;

static DOI_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^10\.\d{4,9}/\S+$").unwrap());

const RESOLVER_PREFIXES: [&str; 7] = [
    "https://doi.org/",
    "http://doi.org/",
    "https://dx.doi.org/",
    "http://dx.doi.org/",
    "doi.org/",
    "dx.doi.org/",
    "doi:",
];

/// Canonical comparison form of free text: NFKC, lowercase, single spaces,
/// trimmed, without enclosing parentheses.
pub fn normalize_text(raw: &str) -> String {
    let mut current = normalize_once(raw);
    // NFKC can surface characters that lowercase further; iterate to a
    // fixed point so the function is idempotent.
    for _ in 0..8 {
        let next = normalize_once(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn normalize_once(raw: &str) -> String {
    let folded: String = raw.nfkc().collect::<String>().to_lowercase();
    let mut s = collapse_whitespace(&folded);
    while let Some(inner) = strip_enclosing_parens(&s) {
        s = collapse_whitespace(inner);
    }
    s
}

fn collapse_whitespace(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Returns the contents when the whole string is one parenthesized group,
/// e.g. "(a (b))" but not "(a) (b)".
fn strip_enclosing_parens(s: &str) -> Option<&str> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let mut depth = 0i32;
    for c in inner.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    (depth == 0).then_some(inner)
}

/// Lowercased DOI without resolver prefix.
pub fn normalize_doi(raw: &str) -> Result<String, MalformedDoi> {
    let trimmed = raw.trim();
    let mut rest = trimmed;
    for prefix in RESOLVER_PREFIXES {
        if rest.len() >= prefix.len() && rest[..prefix.len()].eq_ignore_ascii_case(prefix) {
            rest = rest[prefix.len()..].trim_start();
            break;
        }
    }
    let doi = rest.to_lowercase();
    if DOI_RE.is_match(&doi) {
        Ok(doi)
    } else {
        Err(MalformedDoi(raw.to_string()))
    }
}
