//! Publisher-to-repository standardization.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::DatasetRecord;
use crate::text::normalize_text;

pub const ZENODO: &str = "Zenodo";
pub const FIGSHARE: &str = "Figshare";
pub const DRYAD: &str = "Dryad";
pub const DESIGNSAFE: &str = "DesignSafe";

/// Maps raw publisher strings onto standardized repository names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepositoryNames {
    /// Raw publisher spelling to repository name; keys compare normalized.
    pub aliases: BTreeMap<String, String>,
    /// DOI prefix to repository, for platforms whose publisher field is
    /// freely edited or names a partner journal.
    pub prefixes: BTreeMap<String, String>,
}

impl Default for RepositoryNames {
    fn default() -> Self {
        let aliases = [
            ("Dryad", DRYAD),
            ("Dryad Digital Repository", DRYAD),
            ("Zenodo", ZENODO),
            ("figshare", FIGSHARE),
            ("Figshare", FIGSHARE),
            ("figshare Academic Research System", FIGSHARE),
            ("Texas Data Repository", "Texas Data Repository"),
            ("Texas Data Repository Dataverse", "Texas Data Repository"),
            ("Harvard Dataverse", "Harvard Dataverse"),
            ("DesignSafe-CI", DESIGNSAFE),
            ("DesignSafe", DESIGNSAFE),
            ("ICPSR", "ICPSR"),
            ("Inter-university Consortium for Political and Social Research", "ICPSR"),
            ("Environmental Molecular Sciences Laboratory", "EMSL"),
            ("EMSL", "EMSL"),
            ("Mendeley", "Mendeley Data"),
            ("Mendeley Data", "Mendeley Data"),
            ("NCBI", "NCBI"),
        ];
        let prefixes = [("10.6084", FIGSHARE), ("10.5061", DRYAD), ("10.5281", ZENODO)];
        RepositoryNames {
            aliases: aliases.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            prefixes: prefixes.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        }
    }
}

impl RepositoryNames {
    /// Standardized repository for a record. The publisher field is kept
    /// as is; any DOI containing "zenodo" is Zenodo.
    pub fn repository_for(&self, record: &DatasetRecord) -> String {
        self.index().repository_for(record)
    }

    /// Lookup table with alias keys normalized once, for bulk use.
    pub fn index(&self) -> NameIndex<'_> {
        NameIndex {
            aliases: self.aliases.iter().map(|(a, r)| (normalize_text(a), r.as_str())).collect(),
            prefixes: &self.prefixes,
        }
    }
}

pub struct NameIndex<'a> {
    aliases: BTreeMap<String, &'a str>,
    prefixes: &'a BTreeMap<String, String>,
}

impl NameIndex<'_> {
    pub fn repository_for(&self, record: &DatasetRecord) -> String {
        if record.doi.contains("zenodo") {
            return ZENODO.to_string();
        }
        let prefix = record.doi.split('/').next().unwrap_or("");
        if let Some(r) = self.prefixes.get(prefix) {
            return r.clone();
        }
        if let Some(r) = self.aliases.get(&normalize_text(&record.publisher_raw)) {
            return r.to_string();
        }
        if record.publisher_raw.is_empty() {
            record.repository.clone()
        } else {
            record.publisher_raw.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SourceTag;

    fn rec(doi: &str, publisher: &str) -> DatasetRecord {
        let mut r = DatasetRecord::new(doi, SourceTag::DataciteGeneral);
        r.publisher_raw = publisher.into();
        r
    }

    #[test]
    fn zenodo_by_doi_string() {
        assert_eq!(RepositoryNames::default().repository_for(&rec("10.5281/zenodo.12626", "rogue value")), "Zenodo");
    }

    #[test]
    fn aliases_and_passthrough() {
        let n = RepositoryNames::default();
        assert_eq!(n.repository_for(&rec("10.9999/x", "Dryad Digital Repository")), "Dryad");
        assert_eq!(n.repository_for(&rec("10.9999/x", "Some Lab Portal")), "Some Lab Portal");
        assert_eq!(n.repository_for(&rec("10.6084/m9.figshare.1", "Taylor & Francis")), "Figshare");
    }
}
