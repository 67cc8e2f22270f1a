//! Repository-specific DOI structure: file-level DOIs, version suffixes and
//! lineage keys, plus relation-based Zenodo lineage grouping.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{DatasetRecord, RelatedIdentifier};
use crate::text::normalize_text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DoiKind {
    DatasetLevel,
    VersionChild(u32),
    FileLevelDataverse,
    FileLevelDryad,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DoiClass {
    pub kind: DoiKind,
    /// Base DOI of the family; equals the classified DOI for dataset-level
    /// and unknown DOIs.
    pub lineage_key: String,
}

impl DoiClass {
    fn of(kind: DoiKind, key: &str) -> Self {
        DoiClass { kind, lineage_key: key.to_string() }
    }

    pub fn is_file_level(&self) -> bool {
        matches!(self.kind, DoiKind::FileLevelDataverse | DoiKind::FileLevelDryad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Dataverse installations: file DOIs append one segment to the dataset DOI.
    Dataverse,
    /// Dryad: file DOIs append `/N` to the dataset DOI.
    Dryad,
    /// Platforms appending `.vN` for versions (Figshare, ICPSR, Mendeley Data).
    VersionSuffix,
    /// Zenodo: concept and version DOIs linked by relations.
    Zenodo,
}

/// One repository (or group of repositories) sharing a DOI grammar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRule {
    pub family: Family,
    /// Publisher names; a hint containing one of them selects the rule.
    #[serde(default)]
    pub publishers: Vec<String>,
    /// DOI prefixes such as `10.18738`.
    #[serde(default)]
    pub prefixes: Vec<String>,
    /// Slash-separated suffix segments of a dataset-level DOI (Dataverse only).
    #[serde(default = "default_dataset_segments")]
    pub dataset_segments: usize,
}

fn default_dataset_segments() -> usize {
    2
}

/// Ordered set of family rules; DOI prefixes are consulted before publisher
/// hints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoiGrammar {
    pub rules: Vec<FamilyRule>,
}

impl Default for DoiGrammar {
    fn default() -> Self {
        let rule = |family, publishers: &[&str], prefixes: &[&str]| FamilyRule {
            family,
            publishers: publishers.iter().map(|s| s.to_string()).collect(),
            prefixes: prefixes.iter().map(|s| s.to_string()).collect(),
            dataset_segments: 2,
        };
        DoiGrammar {
            rules: vec![
                rule(
                    Family::Dataverse,
                    &["Texas Data Repository", "Harvard Dataverse", "Dataverse"],
                    &["10.18738", "10.7910"],
                ),
                rule(Family::Dryad, &["Dryad"], &["10.5061"]),
                rule(
                    Family::VersionSuffix,
                    &["figshare", "ICPSR", "Inter-university Consortium for Political and Social Research", "Mendeley"],
                    &["10.6084", "10.3886", "10.17632"],
                ),
                rule(Family::Zenodo, &["Zenodo"], &["10.5281"]),
            ],
        }
    }
}

fn split_doi(doi: &str) -> Option<(&str, &str)> {
    let (prefix, suffix) = doi.split_once('/')?;
    (!suffix.is_empty()).then_some((prefix, suffix))
}

impl DoiGrammar {
    pub fn rule_for(&self, doi: &str, publisher_hint: &str) -> Option<&FamilyRule> {
        let prefix = split_doi(doi).map(|(p, _)| p).unwrap_or("");
        if let Some(r) = self.rules.iter().find(|r| r.prefixes.iter().any(|p| p == prefix)) {
            return Some(r);
        }
        let hint = normalize_text(publisher_hint);
        if hint.is_empty() {
            return None;
        }
        self.rules
            .iter()
            .find(|r| r.publishers.iter().any(|p| hint.contains(&normalize_text(p))))
    }

    pub fn family(&self, doi: &str, publisher_hint: &str) -> Option<Family> {
        self.rule_for(doi, publisher_hint).map(|r| r.family)
    }

    pub fn classify(&self, doi: &str, publisher_hint: &str) -> DoiClass {
        let Some((_, suffix)) = split_doi(doi) else {
            return DoiClass::of(DoiKind::Unknown, doi);
        };
        let Some(rule) = self.rule_for(doi, publisher_hint) else {
            return DoiClass::of(DoiKind::DatasetLevel, doi);
        };
        match rule.family {
            Family::Dataverse => {
                let segments: Vec<&str> = suffix.split('/').collect();
                if segments.iter().any(|s| s.is_empty()) {
                    DoiClass::of(DoiKind::Unknown, doi)
                } else if segments.len() == rule.dataset_segments {
                    DoiClass::of(DoiKind::DatasetLevel, doi)
                } else if segments.len() == rule.dataset_segments + 1 {
                    let cut = doi.rfind('/').expect("has a slash");
                    DoiClass::of(DoiKind::FileLevelDataverse, &doi[..cut])
                } else {
                    DoiClass::of(DoiKind::Unknown, doi)
                }
            }
            Family::Dryad => {
                let segments: Vec<&str> = suffix.split('/').collect();
                match segments.as_slice() {
                    [_] => DoiClass::of(DoiKind::DatasetLevel, doi),
                    [base, n] if !base.is_empty() && !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) => {
                        let cut = doi.rfind('/').expect("has a slash");
                        DoiClass::of(DoiKind::FileLevelDryad, &doi[..cut])
                    }
                    _ => DoiClass::of(DoiKind::Unknown, doi),
                }
            }
            Family::VersionSuffix => match version_suffix(doi) {
                None => DoiClass::of(DoiKind::DatasetLevel, doi),
                Some((stem, Some(n))) if n >= 1 && version_suffix(stem).is_none() && split_doi(stem).is_some() => {
                    DoiClass::of(DoiKind::VersionChild(n), stem)
                }
                Some(_) => DoiClass::of(DoiKind::Unknown, doi),
            },
            Family::Zenodo => DoiClass::of(DoiKind::DatasetLevel, doi),
        }
    }
}

/// Splits a trailing `.vN` (case-insensitive). The version is `None` when
/// the digits overflow.
fn version_suffix(doi: &str) -> Option<(&str, Option<u32>)> {
    let dot = doi.rfind('.')?;
    let tail = &doi[dot + 1..];
    let digits = tail.strip_prefix('v').or_else(|| tail.strip_prefix('V'))?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((&doi[..dot], digits.parse().ok()))
}

/// Classifies with the default grammar.
pub fn classify_doi(doi: &str, publisher_hint: &str) -> DoiClass {
    DoiGrammar::default().classify(doi, publisher_hint)
}

impl DoiGrammar {
    /// Record-level classification: DOI structure, plus an `IsPartOf`
    /// relation to a prefix parent for Dataverse-family records.
    pub fn classify_record(&self, record: &DatasetRecord) -> DoiClass {
        let hint = format!("{} | {}", record.publisher_raw, record.repository);
        let class = self.classify(&record.doi, &hint);
        if !matches!(class.kind, DoiKind::DatasetLevel | DoiKind::Unknown) {
            return class;
        }
        if self.family(&record.doi, &hint) != Some(Family::Dataverse) {
            return class;
        }
        record
            .related_identifiers
            .iter()
            .filter(|r| r.is("IsPartOf"))
            .filter_map(RelatedIdentifier::doi)
            .filter(|p| record.doi.len() > p.len() + 1 && record.doi.starts_with(p.as_str()))
            .filter(|p| record.doi.as_bytes()[p.len()] == b'/')
            .min()
            .map(|p| DoiClass::of(DoiKind::FileLevelDataverse, &p))
            .unwrap_or(class)
    }
}

/// Numeric record id of a Zenodo DOI (`10.5281/zenodo.N`).
pub fn zenodo_number(doi: &str) -> Option<u64> {
    let (_, suffix) = split_doi(doi)?;
    let n = suffix.strip_prefix("zenodo.")?;
    if n.is_empty() || !n.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    n.parse().ok()
}

fn is_zenodo_doi(doi: &str) -> bool {
    doi.contains("zenodo.")
}

/// Sort key placing Zenodo DOIs in numeric order.
fn zenodo_order(doi: &str) -> (u64, &str) {
    (zenodo_number(doi).unwrap_or(u64::MAX), doi)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZenodoLineage {
    /// Lineage key to the member DOIs present in the input.
    pub groups: BTreeMap<String, BTreeSet<String>>,
    /// Keys whose concept record is not in the input.
    pub orphan_keys: BTreeSet<String>,
}

impl ZenodoLineage {
    pub fn key_of(&self, doi: &str) -> Option<&str> {
        self.groups
            .iter()
            .find(|(_, m)| m.contains(doi))
            .map(|(k, _)| k.as_str())
    }

    /// Member DOI to lineage key.
    pub fn membership(&self) -> BTreeMap<&str, &str> {
        self.groups
            .iter()
            .flat_map(|(k, ms)| ms.iter().map(move |m| (m.as_str(), k.as_str())))
            .collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Groups Zenodo records into lineages.
///
/// `IsVersionOf`/`HasVersion` relations link versions to their concept DOI,
/// which becomes the key even when it is absent from the input (an orphan
/// lineage). A record carrying a `consolidation_group` from an earlier run
/// rejoins that key. Records without any relation fall back to numeric
/// adjacency: `N` and `N+1` pair up, keyed on `N`.
pub fn zenodo_lineage(records: &[DatasetRecord]) -> ZenodoLineage {
    let present: BTreeSet<&str> = records.iter().map(|r| r.doi.as_str()).collect();

    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut names: Vec<String> = Vec::new();
    let id = |doi: &str, index: &mut BTreeMap<String, usize>, names: &mut Vec<String>| -> usize {
        if let Some(&i) = index.get(doi) {
            return i;
        }
        index.insert(doi.to_string(), names.len());
        names.push(doi.to_string());
        names.len() - 1
    };

    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut children: BTreeSet<usize> = BTreeSet::new();
    let mut concepts: BTreeSet<usize> = BTreeSet::new();
    let mut touched: BTreeSet<usize> = BTreeSet::new();

    let mut sorted: Vec<&DatasetRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.doi.cmp(&b.doi));
    for r in &sorted {
        let me = id(&r.doi, &mut index, &mut names);
        for rel in &r.related_identifiers {
            let parent_child = if rel.is("IsVersionOf") {
                rel.doi().filter(|t| is_zenodo_doi(t) && *t != r.doi).map(|t| (t, r.doi.clone()))
            } else if rel.is("HasVersion") {
                rel.doi().filter(|t| is_zenodo_doi(t) && *t != r.doi).map(|t| (r.doi.clone(), t))
            } else {
                None
            };
            if let Some((p, c)) = parent_child {
                let (pi, ci) = (id(&p, &mut index, &mut names), id(&c, &mut index, &mut names));
                edges.push((pi, ci));
                children.insert(ci);
                concepts.insert(pi);
                touched.extend([pi, ci]);
            }
        }
        if let Some(g) = r.consolidation_group.as_deref().filter(|g| is_zenodo_doi(g)) {
            let gi = id(g, &mut index, &mut names);
            edges.push((gi, me));
            touched.extend([gi, me]);
        }
    }

    let mut uf = UnionFind::new(names.len());
    for &(a, b) in &edges {
        uf.union(a, b);
    }

    // Candidate keys per component: concept nodes that are not themselves
    // versions, and keys carried over from an earlier run.
    let mut candidates: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &c in concepts.difference(&children) {
        candidates.entry(uf.find(c)).or_default().push(c);
    }
    for r in &sorted {
        if let Some(g) = r.consolidation_group.as_deref().filter(|g| is_zenodo_doi(g)) {
            let gi = index[g];
            candidates.entry(uf.find(gi)).or_default().push(gi);
        }
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..names.len() {
        members.entry(uf.find(i)).or_default().push(i);
    }

    let mut out = ZenodoLineage::default();
    for (root, nodes) in &members {
        let in_corpus: BTreeSet<String> = nodes
            .iter()
            .map(|&i| names[i].clone())
            .filter(|d| present.contains(d.as_str()))
            .collect();
        if in_corpus.is_empty() {
            continue;
        }
        let relationless = nodes.len() == 1 && !touched.contains(&nodes[0]);
        if relationless {
            continue;
        }
        let pool = candidates.get(root).map(Vec::as_slice).unwrap_or(nodes);
        let key = pool
            .iter()
            .map(|&i| names[i].as_str())
            .min_by(|a, b| zenodo_order(a).cmp(&zenodo_order(b)))
            .expect("component is non-empty")
            .to_string();
        if !present.contains(key.as_str()) {
            out.orphan_keys.insert(key.clone());
        }
        out.groups.entry(key).or_default().extend(in_corpus);
    }

    // Adjacency fallback for records untouched by any relation.
    let mut loose: Vec<(u64, &str)> = Vec::new();
    for r in &sorted {
        let i = index[r.doi.as_str()];
        if touched.contains(&i) {
            continue;
        }
        match zenodo_number(&r.doi) {
            Some(n) => loose.push((n, r.doi.as_str())),
            None => {
                out.groups.entry(r.doi.clone()).or_default().insert(r.doi.clone());
            }
        }
    }
    loose.sort();
    loose.dedup();
    let mut i = 0;
    while i < loose.len() {
        let (n, doi) = loose[i];
        let key = doi.to_string();
        let group = out.groups.entry(key).or_default();
        group.insert(doi.to_string());
        if let Some(&(m, next)) = loose.get(i + 1) {
            if m == n + 1 {
                group.insert(next.to_string());
                i += 1;
            }
        }
        i += 1;
    }
    out
}
