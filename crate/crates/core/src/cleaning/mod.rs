//! Staged deduplication and consolidation of a harvested corpus.
//!
//! Each stage sorts its input by DOI, so results do not depend on input
//! order, and every removal is logged with the stage that made it.

pub mod names;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::doi::{zenodo_lineage, DoiGrammar, DoiKind, Family};
use crate::model::DatasetRecord;
use crate::text::normalize_text;

pub use names::RepositoryNames;

pub const STAGE_NORMALIZE: &str = "normalize_names";
pub const STAGE_FILE_LEVEL: &str = "remove_file_level";
pub const STAGE_ZENODO: &str = "consolidate_zenodo";
pub const STAGE_VERSIONS: &str = "consolidate_versions";
pub const STAGE_FIGSHARE: &str = "consolidate_figshare_by_article";
pub const STAGE_FLAT: &str = "dedup_flat_metadata";
pub const STAGE_DESIGNSAFE: &str = "filter_designsafe";
pub const STAGE_DATAVERSE_PARTIAL: &str = "dedup_dataverse_partial";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CleaningOptions {
    pub grammar: DoiGrammar,
    pub names: RepositoryNames,
    /// Publishers whose deposits are hosted on Figshare under a journal label.
    pub figshare_partners: Vec<String>,
    pub designsafe_filter: bool,
    pub designsafe_repository: String,
    /// Affiliation form that only DesignSafe's own UT Austin records carry.
    pub designsafe_qualified_affiliation: String,
    /// Collapse Dataverse records agreeing on date, creators and rights.
    pub dataverse_partial_dedup: bool,
}

impl Default for CleaningOptions {
    fn default() -> Self {
        CleaningOptions {
            grammar: DoiGrammar::default(),
            names: RepositoryNames::default(),
            figshare_partners: vec!["Taylor & Francis".into(), "SAGE Journals".into(), "Optica Publishing Group".into()],
            designsafe_filter: true,
            designsafe_repository: names::DESIGNSAFE.into(),
            designsafe_qualified_affiliation: "University of Texas at Austin (utexas.edu)".into(),
            dataverse_partial_dedup: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCount {
    pub name: String,
    pub before: usize,
    pub after: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropEntry {
    pub doi: String,
    pub stage: String,
    pub reason: String,
    pub consolidated_into: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub stages: Vec<StageCount>,
    pub drops: Vec<DropEntry>,
    /// Observations that did not remove anything: likely cross-repository
    /// duplicates and Zenodo lineages whose concept record is missing.
    pub flags: Vec<String>,
}

impl CleaningReport {
    pub fn drops_in(&self, stage: &str) -> impl Iterator<Item = &DropEntry> {
        let stage = stage.to_string();
        self.drops.iter().filter(move |d| d.stage == stage)
    }

    pub fn write_json<W: Write>(&self, w: W) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(w, self)
    }

    /// Drop log as CSV: doi, stage, reason, consolidated_into.
    pub fn write_drops_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["doi", "stage", "reason", "consolidated_into"])?;
        for d in &self.drops {
            out.write_record([&d.doi, &d.stage, &d.reason, d.consolidated_into.as_deref().unwrap_or("")])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CleaningOutcome {
    /// Retained records sorted by DOI.
    pub records: Vec<DatasetRecord>,
    pub report: CleaningReport,
}

struct Run<'a> {
    opts: &'a CleaningOptions,
    report: CleaningReport,
}

impl Run<'_> {
    fn stage(
        &mut self,
        name: &str,
        mut records: Vec<DatasetRecord>,
        f: impl FnOnce(&CleaningOptions, Vec<DatasetRecord>, &mut Vec<DropEntry>) -> Vec<DatasetRecord>,
    ) -> Vec<DatasetRecord> {
        records.sort_by(|a, b| a.doi.cmp(&b.doi));
        let before = records.len();
        let mut drops = Vec::new();
        let mut out = f(self.opts, records, &mut drops);
        out.sort_by(|a, b| a.doi.cmp(&b.doi));
        debug_assert_eq!(before - out.len(), drops.len(), "stage {name} lost records");
        drops.sort_by(|a, b| a.doi.cmp(&b.doi));
        for d in &mut drops {
            d.stage = name.to_string();
        }
        self.report.stages.push(StageCount { name: name.into(), before, after: out.len() });
        self.report.drops.extend(drops);
        out
    }
}

fn hint(r: &DatasetRecord) -> String {
    format!("{} | {}", r.publisher_raw, r.repository)
}

fn drop(doi: &str, reason: impl Into<String>, into: Option<String>) -> DropEntry {
    DropEntry { doi: doi.to_string(), stage: String::new(), reason: reason.into(), consolidated_into: into }
}

/// Runs every stage in order. Input records already marked as dropped are
/// ignored; the output holds retained records only.
pub fn run_cleaning_pipeline(records: Vec<DatasetRecord>, opts: &CleaningOptions) -> CleaningOutcome {
    let mut run = Run { opts, report: CleaningReport::default() };
    let records: Vec<DatasetRecord> = records.into_iter().filter(|r| r.retained).collect();

    let records = run.stage(STAGE_NORMALIZE, records, normalize_names);
    let records = run.stage(STAGE_FILE_LEVEL, records, remove_file_level);
    let mut orphans = Vec::new();
    let records = run.stage(STAGE_ZENODO, records, |o, rs, d| {
        let (out, orph) = consolidate_zenodo(o, rs, d);
        orphans = orph;
        out
    });
    let records = run.stage(STAGE_VERSIONS, records, consolidate_versions);
    let records = run.stage(STAGE_FIGSHARE, records, consolidate_figshare_by_article);
    let records = run.stage(STAGE_FLAT, records, dedup_flat_metadata);
    let records = if opts.designsafe_filter {
        run.stage(STAGE_DESIGNSAFE, records, filter_designsafe)
    } else {
        records
    };
    let records = if opts.dataverse_partial_dedup {
        run.stage(STAGE_DATAVERSE_PARTIAL, records, dedup_dataverse_partial)
    } else {
        records
    };

    run.report.flags.extend(orphans.into_iter().map(|k| format!("zenodo lineage {k}: concept record not in corpus")));
    run.report.flags.extend(cross_repository_flags(&records));
    CleaningOutcome { records, report: run.report }
}

/// Standardizes `repository` and resolves records sharing a DOI in favour
/// of the higher-precedence source.
pub fn normalize_names(opts: &CleaningOptions, records: Vec<DatasetRecord>, drops: &mut Vec<DropEntry>) -> Vec<DatasetRecord> {
    let mut by_doi: BTreeMap<String, Vec<DatasetRecord>> = BTreeMap::new();
    let index = opts.names.index();
    let partners = partner_keys(opts);
    for mut r in records {
        r.repository = index.repository_for(&r);
        if partners.contains(&normalize_text(&r.publisher_raw))
            && opts.grammar.family(&r.doi, "") == Some(Family::VersionSuffix)
        {
            r.repository = names::FIGSHARE.into();
        }
        by_doi.entry(r.doi.clone()).or_default().push(r);
    }
    let mut out = Vec::new();
    for (doi, mut group) in by_doi {
        if group.len() > 1 {
            group.sort_by_cached_key(|r| (r.source.precedence(), serde_json::to_string(r).unwrap_or_default()));
        }
        let mut it = group.into_iter();
        let keep = it.next().expect("non-empty group");
        for other in it {
            drops.push(drop(&doi, format!("duplicate DOI from {}", other.source), Some(doi.clone())));
        }
        out.push(keep);
    }
    out
}

/// Drops Dataverse and Dryad file-level DOIs, pointing at the dataset DOI.
pub fn remove_file_level(opts: &CleaningOptions, records: Vec<DatasetRecord>, drops: &mut Vec<DropEntry>) -> Vec<DatasetRecord> {
    let present: BTreeSet<String> = records.iter().map(|r| r.doi.clone()).collect();
    records
        .into_iter()
        .filter(|r| {
            let class = opts.grammar.classify_record(r);
            let what = match class.kind {
                DoiKind::FileLevelDataverse => "Dataverse",
                DoiKind::FileLevelDryad => "Dryad",
                _ => return true,
            };
            let into = present.contains(&class.lineage_key).then(|| class.lineage_key.clone());
            drops.push(drop(&r.doi, format!("{what} file-level DOI of {}", class.lineage_key), into));
            false
        })
        .collect()
}

/// Keeps one record per Zenodo lineage: the concept record when present,
/// otherwise the smallest DOI. Returns the orphan lineage keys too.
pub fn consolidate_zenodo(
    _opts: &CleaningOptions,
    records: Vec<DatasetRecord>,
    drops: &mut Vec<DropEntry>,
) -> (Vec<DatasetRecord>, Vec<String>) {
    let (zen, mut rest): (Vec<_>, Vec<_>) = records.into_iter().partition(|r| r.repository == names::ZENODO);
    let lineage = zenodo_lineage(&zen);
    let membership: BTreeMap<String, String> =
        lineage.membership().into_iter().map(|(m, k)| (m.to_string(), k.to_string())).collect();
    let mut groups: BTreeMap<String, Vec<DatasetRecord>> = BTreeMap::new();
    for r in zen {
        let key = membership.get(&r.doi).cloned().unwrap_or_else(|| r.doi.clone());
        groups.entry(key).or_default().push(r);
    }
    for (key, members) in groups {
        let rep = members
            .iter()
            .find(|r| r.doi == key)
            .or_else(|| members.iter().min_by(|a, b| a.doi.cmp(&b.doi)))
            .map(|r| r.doi.clone())
            .expect("non-empty group");
        for mut r in members {
            if r.doi == rep {
                r.consolidation_group = Some(key.clone());
                rest.push(r);
            } else {
                drops.push(drop(&r.doi, format!("Zenodo version of lineage {key}"), Some(rep.clone())));
            }
        }
    }
    (rest, lineage.orphan_keys.into_iter().collect())
}

/// Collapses `.vN` version DOIs onto the unversioned parent, or onto the
/// lowest version when the parent is absent.
pub fn consolidate_versions(opts: &CleaningOptions, records: Vec<DatasetRecord>, drops: &mut Vec<DropEntry>) -> Vec<DatasetRecord> {
    let mut rest = Vec::new();
    // lineage key -> (version or 0 for the parent, record)
    let mut groups: BTreeMap<String, Vec<(u32, DatasetRecord)>> = BTreeMap::new();
    for r in records {
        let class = opts.grammar.classify_record(&r);
        match class.kind {
            DoiKind::VersionChild(n) => groups.entry(class.lineage_key).or_default().push((n, r)),
            DoiKind::DatasetLevel if opts.grammar.family(&r.doi, &hint(&r)) == Some(Family::VersionSuffix) => {
                groups.entry(class.lineage_key).or_default().push((0, r))
            }
            _ => rest.push(r),
        }
    }
    for (key, mut members) in groups {
        members.sort_by(|a, b| (a.0, &a.1.doi).cmp(&(b.0, &b.1.doi)));
        let mut it = members.into_iter();
        let (_, mut keep) = it.next().expect("non-empty group");
        let mut merged = false;
        for (n, r) in it {
            merged = true;
            drops.push(drop(&r.doi, format!("version {n} of {key}"), Some(keep.doi.clone())));
        }
        if merged && keep.consolidation_group.is_none() {
            keep.consolidation_group = Some(key);
        }
        rest.push(keep);
    }
    rest
}

fn partner_keys(opts: &CleaningOptions) -> BTreeSet<String> {
    opts.figshare_partners.iter().map(|p| normalize_text(p)).collect()
}

fn is_figshare_family(partners: &BTreeSet<String>, r: &DatasetRecord) -> bool {
    r.repository == names::FIGSHARE || partners.contains(&normalize_text(&r.publisher_raw))
}

/// Figshare deposits supplementing the same article become one dataset,
/// keyed on the smallest supplemented article DOI.
pub fn consolidate_figshare_by_article(
    opts: &CleaningOptions,
    records: Vec<DatasetRecord>,
    drops: &mut Vec<DropEntry>,
) -> Vec<DatasetRecord> {
    let mut rest = Vec::new();
    let mut groups: BTreeMap<String, Vec<DatasetRecord>> = BTreeMap::new();
    let partners = partner_keys(opts);
    for r in records {
        let article = if is_figshare_family(&partners, &r) {
            r.supplemented_articles().into_iter().next().or_else(|| r.linked_article.clone())
        } else {
            None
        };
        match article {
            Some(a) => groups.entry(a).or_default().push(r),
            None => rest.push(r),
        }
    }
    rest.extend(collapse(groups, drops, |key| format!("Figshare deposit supplementing article {key}")));
    rest
}

/// Keeps the smallest DOI of each group; the rest are logged as merged into
/// it. Groups of one pass through untouched.
fn collapse<K: Ord + std::fmt::Display>(
    groups: BTreeMap<K, Vec<DatasetRecord>>,
    drops: &mut Vec<DropEntry>,
    reason: impl Fn(&K) -> String,
) -> Vec<DatasetRecord> {
    let mut out = Vec::new();
    for (key, mut members) in groups {
        members.sort_by(|a, b| a.doi.cmp(&b.doi));
        let mut it = members.into_iter();
        let mut keep = it.next().expect("non-empty group");
        let mut merged = false;
        for r in it {
            merged = true;
            drops.push(drop(&r.doi, reason(&key), Some(keep.doi.clone())));
        }
        if merged && keep.consolidation_group.is_none() {
            keep.consolidation_group = Some(keep.doi.clone());
        }
        out.push(keep);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct FlatKey {
    repository: String,
    title: String,
    first_creator: String,
    related: Vec<(String, String)>,
    container: Option<String>,
}

impl std::fmt::Display for FlatKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} by {:?}", self.title, self.first_creator)
    }
}

/// Collapses records within one repository that agree on title, first
/// creator, the full related-identifier list and container. Records with
/// neither related identifiers nor a container are left alone.
pub fn dedup_flat_metadata(_opts: &CleaningOptions, records: Vec<DatasetRecord>, drops: &mut Vec<DropEntry>) -> Vec<DatasetRecord> {
    let mut rest = Vec::new();
    let mut groups: BTreeMap<FlatKey, Vec<DatasetRecord>> = BTreeMap::new();
    for r in records {
        if r.title.trim().is_empty() || (r.related_identifiers.is_empty() && r.container_identifier.is_none()) {
            rest.push(r);
            continue;
        }
        let key = FlatKey {
            repository: r.repository.clone(),
            title: r.title.clone(),
            first_creator: r.creators.first().map(|a| a.name.clone()).unwrap_or_default(),
            related: r
                .related_identifiers
                .iter()
                .map(|x| (x.relation_type.clone(), x.identifier.to_lowercase()))
                .collect(),
            container: r.container_identifier.clone(),
        };
        groups.entry(key).or_default().push(r);
    }
    rest.extend(collapse(groups, drops, |k| format!("same flat metadata as {k}")));
    rest
}

/// Keeps DesignSafe records only when an agent carries the qualified
/// affiliation form that DesignSafe attaches to its own institution.
pub fn filter_designsafe(opts: &CleaningOptions, records: Vec<DatasetRecord>, drops: &mut Vec<DropEntry>) -> Vec<DatasetRecord> {
    let repo = normalize_text(&opts.designsafe_repository);
    let qualified = normalize_text(&opts.designsafe_qualified_affiliation);
    records
        .into_iter()
        .filter(|r| {
            if normalize_text(&r.repository) != repo {
                return true;
            }
            let ok = r
                .creators
                .iter()
                .chain(&r.contributors)
                .flat_map(|a| a.affiliations.iter().chain(std::iter::once(&a.name)))
                .any(|s| normalize_text(s).contains(&qualified));
            if !ok {
                drops.push(drop(&r.doi, "DesignSafe record without the qualified affiliation", None));
            }
            ok
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct PartialKey {
    repository: String,
    date: String,
    creators: Vec<(String, Vec<String>)>,
    rights: Vec<String>,
}

impl std::fmt::Display for PartialKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} on {}", self.repository, self.date)
    }
}

/// Dataverse deposits split into several datasets on one day by the same
/// creators under the same license.
pub fn dedup_dataverse_partial(opts: &CleaningOptions, records: Vec<DatasetRecord>, drops: &mut Vec<DropEntry>) -> Vec<DatasetRecord> {
    let mut rest = Vec::new();
    let mut groups: BTreeMap<PartialKey, Vec<DatasetRecord>> = BTreeMap::new();
    for r in records {
        let dataverse = opts.grammar.family(&r.doi, &hint(&r)) == Some(Family::Dataverse);
        let date = r.publication_date().map(str::to_string);
        match (dataverse, date) {
            (true, Some(date)) if !r.creators.is_empty() => {
                let key = PartialKey {
                    repository: r.repository.clone(),
                    date,
                    creators: r.creators.iter().map(|a| (a.name.clone(), a.affiliations.clone())).collect(),
                    rights: r.rights_identifiers.clone(),
                };
                groups.entry(key).or_default().push(r);
            }
            _ => rest.push(r),
        }
    }
    rest.extend(collapse(groups, drops, |k| format!("partial duplicate: {k}")));
    rest
}

/// Same normalized title and first creator in different repositories.
/// Dryad/Zenodo pairs are skipped: Dryad mirrors software to Zenodo.
pub fn cross_repository_flags(records: &[DatasetRecord]) -> Vec<String> {
    let mut groups: BTreeMap<(String, String), BTreeMap<String, Vec<&str>>> = BTreeMap::new();
    for r in records {
        let title = normalize_text(&r.title);
        let Some(first) = r.creators.first() else { continue };
        if title.is_empty() {
            continue;
        }
        groups
            .entry((title, normalize_text(&first.name)))
            .or_default()
            .entry(r.repository.clone())
            .or_default()
            .push(&r.doi);
    }
    let mut out = Vec::new();
    for ((title, _), repos) in groups {
        if repos.len() < 2 {
            continue;
        }
        let names: BTreeSet<&str> = repos.keys().map(String::as_str).collect();
        if names == BTreeSet::from([names::DRYAD, names::ZENODO]) {
            continue;
        }
        let dois: Vec<&str> = repos.values().flatten().copied().collect();
        out.push(format!("possible cross-repository duplicate {title:?}: {}", dois.join(", ")));
    }
    out
}
