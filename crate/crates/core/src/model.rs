//! Shared domain types: the focal institution, normalized deposit records and
//! the provenance attached to them.

use std::fmt;
use std::str::FromStr;

use regex::Regex;
use serde::{Deserialize, Serialize};
use std::sync::LazyLock;

use crate::error::ProfileError;
use crate::text::{normalize_doi, normalize_text};

static ROR_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^https://ror\.org/[0-9a-z]{9}$").unwrap());
static ORCID_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\d{4}-\d{4}-\d{4}-\d{3}[\dX]$").unwrap());

/// The institution whose research outputs are being tracked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstitutionProfile {
    pub official_name: String,
    /// Textual variants of the institution name, searched verbatim and used
    /// for containment matching after normalization.
    pub permutations: Vec<String>,
    pub ror_id: String,
    #[serde(default)]
    pub openalex_id: String,
    #[serde(default)]
    pub crossref_affiliation_query: String,
    #[serde(default)]
    pub misspellings_enabled: bool,
    #[serde(default)]
    pub misspellings: Vec<String>,
    /// Longer institution names that embed a permutation but denote a
    /// different organization (e.g. "duke kunshan" for Duke University).
    #[serde(default)]
    pub exclusion_substrings: Vec<String>,
    /// Raw strings sent to exact-match APIs in addition to the permutations.
    /// They normalize onto an existing permutation, so they take no part in
    /// matching (e.g. a parenthesized crosswalk form).
    #[serde(default)]
    pub query_variants: Vec<String>,
}

impl InstitutionProfile {
    pub fn validate(&self) -> Result<(), ProfileError> {
        if self.permutations.is_empty() {
            return Err(ProfileError::NoPermutations);
        }
        let official = normalize_text(&self.official_name);
        let mut seen: Vec<(String, &str)> = Vec::with_capacity(self.permutations.len());
        for p in &self.permutations {
            let n = normalize_text(p);
            if let Some((_, prev)) = seen.iter().find(|(k, _)| *k == n) {
                return Err(ProfileError::DuplicatePermutation(prev.to_string(), p.clone()));
            }
            seen.push((n, p));
        }
        if !seen.iter().any(|(n, _)| *n == official) {
            return Err(ProfileError::OfficialNameMissing(self.official_name.clone()));
        }
        if !ROR_RE.is_match(&self.ror_id) {
            return Err(ProfileError::InvalidRor(self.ror_id.clone()));
        }
        Ok(())
    }

    /// Strings used for matching, in profile order: permutations, then
    /// misspellings when enabled.
    pub fn matching_terms(&self) -> impl Iterator<Item = &str> {
        let extra: &[String] = if self.misspellings_enabled {
            &self.misspellings
        } else {
            &[]
        };
        self.permutations.iter().chain(extra).map(String::as_str)
    }

    /// Strings sent verbatim to exact-match search APIs.
    pub fn query_strings(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.matching_terms().collect();
        out.extend(self.query_variants.iter().map(String::as_str));
        out
    }

    /// Starter profile for The University of Texas at Austin. The permutation
    /// list covers the variants observed in deposit metadata; deployments
    /// extend it through the config file.
    pub fn ut_austin() -> Self {
        InstitutionProfile {
            official_name: "The University of Texas at Austin".into(),
            permutations: [
                "The University of Texas at Austin",
                "University of Texas at Austin",
                "University of Texas, Austin",
                "The University of Texas, Austin",
                "University of Texas - Austin",
                "University of Texas-Austin",
                "Univ. of Texas at Austin",
                "Univ of Texas at Austin",
                "UT Austin",
                "UT-Austin",
                "U.T. Austin",
                "U. T. Austin",
                "Univ. Texas Austin",
                "The Univ. of Texas at Austin",
            ]
            .into_iter()
            .map(String::from)
            .collect(),
            ror_id: "https://ror.org/00hj54h04".into(),
            openalex_id: "https://openalex.org/I86519309".into(),
            crossref_affiliation_query: "university+of+texas+austin".into(),
            misspellings_enabled: false,
            misspellings: vec![
                "Univeristy of Texas at Austin".into(),
                "University of Texas at Austn".into(),
            ],
            exclusion_substrings: vec![],
            query_variants: vec!["(University of Texas at Austin)".into()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub enum NameType {
    Personal,
    Organizational,
    #[default]
    Unknown,
}

/// A creator or contributor on a deposit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct Agent {
    pub name: String,
    #[serde(default)]
    pub name_type: NameType,
    #[serde(default)]
    pub affiliations: Vec<String>,
    #[serde(default)]
    pub affiliation_identifiers: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orcid: Option<String>,
}

impl Agent {
    pub fn personal(name: impl Into<String>, affiliations: &[&str]) -> Self {
        Agent {
            name: name.into(),
            name_type: NameType::Personal,
            affiliations: affiliations.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn organizational(name: impl Into<String>) -> Self {
        Agent {
            name: name.into(),
            name_type: NameType::Organizational,
            ..Default::default()
        }
    }

    /// Accepts bare ORCIDs or resolver URLs; returns `None` for anything that
    /// does not have the ORCID shape.
    pub fn parse_orcid(raw: &str) -> Option<String> {
        let trimmed = raw.trim();
        let bare = trimmed
            .strip_prefix("https://orcid.org/")
            .or_else(|| trimmed.strip_prefix("http://orcid.org/"))
            .unwrap_or(trimmed)
            .to_ascii_uppercase();
        ORCID_RE.is_match(&bare).then_some(bare)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelatedIdentifier {
    pub relation_type: String,
    pub identifier: String,
    #[serde(default)]
    pub identifier_type: String,
}

impl RelatedIdentifier {
    pub fn new(relation_type: &str, identifier: &str, identifier_type: &str) -> Self {
        RelatedIdentifier {
            relation_type: relation_type.into(),
            identifier: identifier.into(),
            identifier_type: identifier_type.into(),
        }
    }

    pub fn is(&self, relation: &str) -> bool {
        self.relation_type.eq_ignore_ascii_case(relation)
    }

    /// The identifier as a normalized DOI, when it is one.
    pub fn doi(&self) -> Option<String> {
        if !self.identifier_type.is_empty() && !self.identifier_type.eq_ignore_ascii_case("doi") {
            // URL-typed identifiers sometimes carry a resolver link
            if !self.identifier.contains("doi.org/") {
                return None;
            }
        }
        normalize_doi(&self.identifier).ok()
    }
}

/// Which discovery route produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceTag {
    DataciteGeneral,
    RepoCrossValidation,
    DataciteOpenalex,
    Ncbi,
    Crossref,
}

impl SourceTag {
    pub const ALL: [SourceTag; 5] = [
        SourceTag::DataciteGeneral,
        SourceTag::RepoCrossValidation,
        SourceTag::DataciteOpenalex,
        SourceTag::Crossref,
        SourceTag::Ncbi,
    ];

    /// Merge precedence; lower wins when two sources return the same DOI.
    pub fn precedence(self) -> u8 {
        match self {
            SourceTag::DataciteGeneral => 0,
            SourceTag::RepoCrossValidation => 1,
            SourceTag::DataciteOpenalex => 2,
            SourceTag::Crossref => 3,
            SourceTag::Ncbi => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SourceTag::DataciteGeneral => "datacite_general",
            SourceTag::RepoCrossValidation => "repo_cross_validation",
            SourceTag::DataciteOpenalex => "datacite_openalex",
            SourceTag::Ncbi => "ncbi",
            SourceTag::Crossref => "crossref",
        }
    }
}

impl fmt::Display for SourceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SourceTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown source tag {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Registry {
    DataCite,
    Crossref,
    #[default]
    None,
}

impl Registry {
    pub fn as_str(self) -> &'static str {
        match self {
            Registry::DataCite => "DataCite",
            Registry::Crossref => "Crossref",
            Registry::None => "None",
        }
    }
}

/// Metadata field in which an institution permutation was detected, in
/// detection-hierarchy order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MatchField {
    CreatorAffiliation,
    ContributorAffiliation,
    CreatorName,
    ContributorName,
}

impl MatchField {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchField::CreatorAffiliation => "creator.affiliationName",
            MatchField::ContributorAffiliation => "contributor.affiliationName",
            MatchField::CreatorName => "creator.name",
            MatchField::ContributorName => "contributor.name",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchEvidence {
    pub field: MatchField,
    pub matched_permutation: String,
    /// The permutation was found inside a longer string (department,
    /// postal address, multi-institution affiliation).
    pub granular: bool,
}

fn default_true() -> bool {
    true
}

/// One deposit, normalized across source APIs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    /// Normalized DOI, or `ncbi:<accession>` for records without one.
    pub doi: String,
    pub source: SourceTag,
    #[serde(default)]
    pub registry: Registry,
    #[serde(default)]
    pub publisher_raw: String,
    #[serde(default)]
    pub repository: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub creators: Vec<Agent>,
    #[serde(default)]
    pub contributors: Vec<Agent>,
    #[serde(default)]
    pub publication_year: Option<i32>,
    #[serde(default)]
    pub registered: Option<String>,
    #[serde(default)]
    pub available: Option<String>,
    #[serde(default)]
    pub updated: Option<String>,
    #[serde(default)]
    pub resource_type_general: String,
    #[serde(default)]
    pub related_identifiers: Vec<RelatedIdentifier>,
    #[serde(default)]
    pub rights_identifiers: Vec<String>,
    #[serde(default)]
    pub formats: Vec<String>,
    #[serde(default)]
    pub sizes: Vec<String>,
    #[serde(default)]
    pub container_identifier: Option<String>,
    #[serde(default)]
    pub r#match: Option<MatchEvidence>,
    /// Article DOI through which an affiliation-less deposit was linked to
    /// the institution.
    #[serde(default)]
    pub linked_article: Option<String>,
    #[serde(default)]
    pub consolidation_group: Option<String>,
    #[serde(default = "default_true")]
    pub retained: bool,
    #[serde(default)]
    pub drop_reason: Option<String>,
}

pub const NCBI_SCHEME: &str = "ncbi:";

impl DatasetRecord {
    pub fn new(doi: impl Into<String>, source: SourceTag) -> Self {
        DatasetRecord {
            doi: doi.into(),
            source,
            registry: Registry::None,
            publisher_raw: String::new(),
            repository: String::new(),
            title: String::new(),
            creators: vec![],
            contributors: vec![],
            publication_year: None,
            registered: None,
            available: None,
            updated: None,
            resource_type_general: String::new(),
            related_identifiers: vec![],
            rights_identifiers: vec![],
            formats: vec![],
            sizes: vec![],
            container_identifier: None,
            r#match: None,
            linked_article: None,
            consolidation_group: None,
            retained: true,
            drop_reason: None,
        }
    }

    pub fn is_ncbi(&self) -> bool {
        self.source == SourceTag::Ncbi || self.doi.starts_with(NCBI_SCHEME)
    }

    /// Article DOIs this deposit declares it supplements, normalized and sorted.
    pub fn supplemented_articles(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .related_identifiers
            .iter()
            .filter(|r| r.is("IsSupplementTo"))
            .filter_map(RelatedIdentifier::doi)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Calendar day of publication: `available`, else `registered`.
    pub fn publication_date(&self) -> Option<&str> {
        self.available
            .as_deref()
            .or(self.registered.as_deref())
            .and_then(|d| d.get(..10))
    }

    pub fn registered_year(&self) -> Option<i32> {
        year_of(self.registered.as_deref()?)
    }

    /// Invariant violations, empty when the record is well formed.
    pub fn violations(&self, current_year: i32) -> Vec<String> {
        let mut out = Vec::new();
        if !self.retained && self.drop_reason.is_none() {
            out.push("dropped record without drop_reason".to_string());
        }
        if let Some(y) = self.publication_year {
            if !(1990..=current_year + 1).contains(&y) {
                out.push(format!("publication_year {y} outside [1990, {}]", current_year + 1));
            }
        }
        for a in self.creators.iter().chain(&self.contributors) {
            if let Some(o) = &a.orcid {
                if !ORCID_RE.is_match(o) {
                    out.push(format!("malformed ORCID {o:?}"));
                }
            }
        }
        for r in &self.related_identifiers {
            if r.relation_type.is_empty() || r.identifier.is_empty() {
                out.push("related identifier with empty relation or identifier".to_string());
            }
        }
        out
    }
}

/// Leading four-digit year of an ISO-8601 date or timestamp.
pub fn year_of(date: &str) -> Option<i32> {
    let head = date.trim().get(..4)?;
    if head.bytes().all(|b| b.is_ascii_digit()) {
        head.parse().ok()
    } else {
        None
    }
}
