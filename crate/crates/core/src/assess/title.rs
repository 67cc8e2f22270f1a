//! Title descriptiveness: how many tokens carry meaning.

use serde::{Deserialize, Serialize};

pub const DEFAULT_NONDESCRIPT: &[&str] = &[
    "a", "an", "the", "of", "in", "on", "at", "to", "for", "from", "by", "with", "into", "about", "over", "under",
    "between", "through", "during", "via", "data", "dataset", "supplementary", "file",
];

pub fn default_nondescript() -> Vec<String> {
    DEFAULT_NONDESCRIPT.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TitleScore {
    pub token_count: usize,
    pub descriptive_token_count: usize,
}

/// Tokens are maximal runs of letters and digits; comparison with the
/// nondescript list ignores case.
pub fn score_title(title: &str, nondescript: &[String]) -> TitleScore {
    let tokens: Vec<String> = title
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect();
    let descriptive = tokens.iter().filter(|t| !nondescript.iter().any(|n| n.to_lowercase() == **t)).count();
    TitleScore { token_count: tokens.len(), descriptive_token_count: descriptive }
}
