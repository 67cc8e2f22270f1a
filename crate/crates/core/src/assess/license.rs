//! Rights identifiers mapped onto license buckets.

use serde::{Deserialize, Serialize};

pub const RIGHTS_UNCLEAR: &str = "RightsUnclear";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseClass {
    pub canonical: String,
    pub is_software_license: bool,
    /// More than one distinct bucket was listed; `canonical` is the most
    /// restrictive of them.
    pub conflict: bool,
}

/// Ordered alias patterns and the restrictiveness ranking of buckets.
///
/// Identifiers are lowercased with spaces and underscores turned into `-`
/// before matching. A pattern starting with `^` must match at the start,
/// otherwise it may occur anywhere. The first matching pattern wins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LicenseTable {
    pub aliases: Vec<(String, String)>,
    /// Least to most restrictive.
    pub ranking: Vec<String>,
    pub software_licenses: Vec<String>,
}

impl Default for LicenseTable {
    fn default() -> Self {
        let aliases = [
            ("cc0", "CC0"),
            ("cc-zero", "CC0"),
            ("publicdomain/zero", "CC0"),
            ("publicdomain/mark", "Public Domain"),
            ("public-domain", "Public Domain"),
            ("pddl", "PDDL"),
            ("by-nc-nd", "CC-BY-NC-ND"),
            ("attribution-noncommercial-noderiv", "CC-BY-NC-ND"),
            ("attribution-non-commercial-no-deriv", "CC-BY-NC-ND"),
            ("by-nc-sa", "CC-BY-NC-SA"),
            ("attribution-noncommercial-sharealike", "CC-BY-NC-SA"),
            ("attribution-non-commercial-share-alike", "CC-BY-NC-SA"),
            ("by-nc", "CC-BY-NC"),
            ("attribution-noncommercial", "CC-BY-NC"),
            ("attribution-non-commercial", "CC-BY-NC"),
            ("by-nd", "CC-BY-ND"),
            ("attribution-noderiv", "CC-BY-ND"),
            ("attribution-no-deriv", "CC-BY-ND"),
            ("by-sa", "CC-BY-SA"),
            ("attribution-sharealike", "CC-BY-SA"),
            ("attribution-share-alike", "CC-BY-SA"),
            ("cc-by", "CC-BY"),
            ("licenses/by/", "CC-BY"),
            ("creative-commons-attribution", "CC-BY"),
            ("odc-by", "ODC-BY"),
            ("odbl", "ODbL"),
            ("apache", "Apache"),
            ("bsd", "BSD"),
            ("^mit", "MIT"),
            ("licenses/mit", "MIT"),
            ("mit-license", "MIT"),
            ("gpl", "GPL"),
        ];
        let ranking = [
            "CC0",
            "Public Domain",
            "PDDL",
            "MIT",
            "BSD",
            "Apache",
            "CC-BY",
            "ODC-BY",
            "CC-BY-SA",
            "ODbL",
            "GPL",
            "CC-BY-ND",
            "CC-BY-NC",
            "CC-BY-NC-SA",
            "CC-BY-NC-ND",
        ];
        LicenseTable {
            aliases: aliases.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            ranking: ranking.iter().map(|s| s.to_string()).collect(),
            software_licenses: ["MIT", "BSD", "Apache", "GPL"].iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl LicenseTable {
    /// Bucket for a single identifier, if recognized.
    pub fn bucket(&self, raw: &str) -> Option<&str> {
        let id: String = raw
            .trim()
            .to_lowercase()
            .chars()
            .map(|c| if c.is_whitespace() || c == '_' { '-' } else { c })
            .collect();
        if id.is_empty() {
            return None;
        }
        self.aliases
            .iter()
            .find(|(pat, _)| match pat.strip_prefix('^') {
                Some(p) => id.starts_with(p),
                None => id.contains(pat.as_str()),
            })
            .map(|(_, c)| c.as_str())
    }

    fn rank(&self, bucket: &str) -> usize {
        self.ranking.iter().position(|b| b == bucket).unwrap_or(self.ranking.len())
    }
}

pub fn normalize_license(rights_identifiers: &[String], table: &LicenseTable) -> LicenseClass {
    let mut buckets: Vec<&str> = rights_identifiers.iter().filter_map(|r| table.bucket(r)).collect();
    buckets.sort_by_key(|b| (table.rank(b), *b));
    buckets.dedup();
    match buckets.last() {
        None => LicenseClass { canonical: RIGHTS_UNCLEAR.into(), is_software_license: false, conflict: false },
        Some(&b) => LicenseClass {
            canonical: b.to_string(),
            is_software_license: table.software_licenses.iter().any(|s| s == b),
            conflict: buckets.len() > 1,
        },
    }
}
