//! Institutional position among the first and last creators.

use serde::{Deserialize, Serialize};

use crate::matching::InstitutionMatcher;
use crate::model::{Agent, DatasetRecord, InstitutionProfile, NameType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AuthorshipPosition {
    First,
    Last,
    Both,
    Neither,
    Single,
    /// Records from sources without a creator schema (NCBI).
    Unclassifiable,
}

impl AuthorshipPosition {
    pub const ALL: [AuthorshipPosition; 6] = [
        AuthorshipPosition::First,
        AuthorshipPosition::Last,
        AuthorshipPosition::Both,
        AuthorshipPosition::Neither,
        AuthorshipPosition::Single,
        AuthorshipPosition::Unclassifiable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AuthorshipPosition::First => "first",
            AuthorshipPosition::Last => "last",
            AuthorshipPosition::Both => "both",
            AuthorshipPosition::Neither => "neither",
            AuthorshipPosition::Single => "single",
            AuthorshipPosition::Unclassifiable => "unclassifiable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Authorship {
    pub position: AuthorshipPosition,
    /// Only organizational creators were listed, so they stood in for
    /// personal authors.
    pub organizational_only: bool,
}

pub struct AuthorshipClassifier {
    matcher: InstitutionMatcher,
}

impl AuthorshipClassifier {
    pub fn new(profile: &InstitutionProfile) -> Self {
        AuthorshipClassifier { matcher: InstitutionMatcher::new(profile) }
    }

    fn affiliated(&self, a: &Agent, organizational: bool) -> bool {
        a.affiliations.iter().any(|s| self.matcher.match_str(s).is_some())
            || (organizational && self.matcher.match_str(&a.name).is_some())
    }

    pub fn classify(&self, record: &DatasetRecord) -> Authorship {
        if record.is_ncbi() {
            return Authorship { position: AuthorshipPosition::Unclassifiable, organizational_only: false };
        }
        let personal: Vec<&Agent> =
            record.creators.iter().filter(|a| a.name_type != NameType::Organizational).collect();
        let organizational_only = personal.is_empty() && !record.creators.is_empty();
        let creators: Vec<&Agent> = if organizational_only { record.creators.iter().collect() } else { personal };
        let position = match creators.as_slice() {
            [] => AuthorshipPosition::Neither,
            [only] => {
                if self.affiliated(only, organizational_only) {
                    AuthorshipPosition::Single
                } else {
                    AuthorshipPosition::Neither
                }
            }
            [first, .., last] => {
                match (self.affiliated(first, organizational_only), self.affiliated(last, organizational_only)) {
                    (true, true) => AuthorshipPosition::Both,
                    (true, false) => AuthorshipPosition::First,
                    (false, true) => AuthorshipPosition::Last,
                    (false, false) => AuthorshipPosition::Neither,
                }
            }
        };
        Authorship { position, organizational_only }
    }
}

pub fn classify_authorship(record: &DatasetRecord, profile: &InstitutionProfile) -> AuthorshipPosition {
    AuthorshipClassifier::new(profile).classify(record).position
}
