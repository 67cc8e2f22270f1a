//! Institution detection over the creator/contributor fields of a record.
//!
//! Fields are scanned in a fixed hierarchy: creator affiliations, contributor
//! affiliations, creator names, contributor names. The first field holding a
//! permutation decides the evidence; inside a field the lowest agent index
//! wins. A permutation matches when it occurs in the normalized string on
//! word boundaries, after masking any of the profile's exclusion substrings.

use crate::model::{Agent, DatasetRecord, InstitutionProfile, MatchEvidence, MatchField};
use crate::text::normalize_text;

/// Precomputed matcher for one institution profile.
#[derive(Debug, Clone)]
pub struct InstitutionMatcher {
    /// (raw permutation, normalized permutation), in profile order
    terms: Vec<(String, String)>,
    exclusions: Vec<String>,
}

impl InstitutionMatcher {
    pub fn new(profile: &InstitutionProfile) -> Self {
        let terms = profile
            .matching_terms()
            .map(|t| (t.to_string(), normalize_text(t)))
            .filter(|(_, n)| !n.is_empty())
            .collect();
        let exclusions = profile
            .exclusion_substrings
            .iter()
            .map(|e| normalize_text(e))
            .filter(|e| !e.is_empty())
            .collect();
        InstitutionMatcher { terms, exclusions }
    }

    /// Tests one free-text value. Returns the matched permutation and whether
    /// the value was longer than it.
    pub fn match_str(&self, value: &str) -> Option<(&str, bool)> {
        let normalized = normalize_text(value);
        if normalized.is_empty() {
            return None;
        }
        let mut masked = normalized.clone();
        for e in &self.exclusions {
            if masked.contains(e.as_str()) {
                masked = masked.replace(e.as_str(), " | ");
            }
        }
        let mut best: Option<&(String, String)> = None;
        for term in &self.terms {
            if !contains_on_boundaries(&masked, &term.1) {
                continue;
            }
            if term.1 == normalized {
                return Some((term.0.as_str(), false));
            }
            if best.is_none_or(|b| term.1.len() > b.1.len()) {
                best = Some(term);
            }
        }
        best.map(|t| (t.0.as_str(), true))
    }

    /// Whether an agent's affiliations or name carry the institution.
    pub fn agent_matches(&self, agent: &Agent) -> bool {
        agent.affiliations.iter().any(|a| self.match_str(a).is_some())
            || self.match_str(&agent.name).is_some()
    }

    pub fn match_record(&self, record: &DatasetRecord) -> Option<MatchEvidence> {
        let affiliation_scan = |agents: &[Agent], field: MatchField| {
            agents.iter().find_map(|a| {
                a.affiliations.iter().find_map(|aff| {
                    self.match_str(aff).map(|(p, granular)| MatchEvidence {
                        field,
                        matched_permutation: p.to_string(),
                        granular,
                    })
                })
            })
        };
        let name_scan = |agents: &[Agent], field: MatchField| {
            agents.iter().find_map(|a| {
                self.match_str(&a.name).map(|(p, granular)| MatchEvidence {
                    field,
                    matched_permutation: p.to_string(),
                    granular,
                })
            })
        };
        affiliation_scan(&record.creators, MatchField::CreatorAffiliation)
            .or_else(|| affiliation_scan(&record.contributors, MatchField::ContributorAffiliation))
            .or_else(|| name_scan(&record.creators, MatchField::CreatorName))
            .or_else(|| name_scan(&record.contributors, MatchField::ContributorName))
    }
}

pub fn match_institution(record: &DatasetRecord, profile: &InstitutionProfile) -> Option<MatchEvidence> {
    InstitutionMatcher::new(profile).match_record(record)
}

fn contains_on_boundaries(haystack: &str, needle: &str) -> bool {
    if needle.is_empty() {
        return false;
    }
    haystack.match_indices(needle).any(|(start, m)| {
        let before_ok = haystack[..start]
            .chars()
            .next_back()
            .is_none_or(|c| !c.is_alphanumeric());
        let after_ok = haystack[start + m.len()..]
            .chars()
            .next()
            .is_none_or(|c| !c.is_alphanumeric());
        before_ok && after_ok
    })
}
