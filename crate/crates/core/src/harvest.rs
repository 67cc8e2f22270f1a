//! The primary harvest: DataCite institution search, repository
//! cross-validation, the optional side sources, and the precedence merge.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::cleaning::RepositoryNames;
use crate::error::SourceError;
use crate::matching::InstitutionMatcher;
use crate::mediated::{fetch_partner_datasets, join_on_article_doi, PartnerPublisher};
use crate::model::{DatasetRecord, InstitutionProfile, SourceTag};
use crate::sources::crossref::{post_filter, CrossrefClient};
use crate::sources::datacite::{DataciteClient, QueryMode};
use crate::sources::ncbi::NcbiClient;
use crate::sources::openalex::OpenAlexClient;
use crate::sources::repos::RepoClient;
use crate::sources::{ResourceType, SourceBatch};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossValidationDiff {
    pub repo: String,
    /// Found by the repository API only.
    pub gained: BTreeSet<String>,
    /// Found by DataCite only.
    pub inverse: BTreeSet<String>,
}

pub fn cross_validate(datacite_dois: &BTreeSet<String>, repo_dois: &BTreeSet<String>, repo: &str) -> CrossValidationDiff {
    CrossValidationDiff {
        repo: repo.to_string(),
        gained: repo_dois.difference(datacite_dois).cloned().collect(),
        inverse: datacite_dois.difference(repo_dois).cloned().collect(),
    }
}

/// One record per DOI, the highest-precedence source winning; identical
/// sources tie-break on the serialized record so stream order never
/// matters. Sorted by DOI.
pub fn merge_records(streams: Vec<Vec<DatasetRecord>>) -> Vec<DatasetRecord> {
    let mut best: BTreeMap<String, (u8, String, DatasetRecord)> = BTreeMap::new();
    for r in streams.into_iter().flatten() {
        let key = (r.source.precedence(), serde_json::to_string(&r).unwrap_or_default());
        match best.get(&r.doi) {
            Some((p, s, _)) if (*p, s.as_str()) <= (key.0, key.1.as_str()) => {}
            _ => {
                best.insert(r.doi.clone(), (key.0, key.1, r));
            }
        }
    }
    best.into_values().map(|(_, _, r)| r).collect()
}

/// Query parameters and toggles for one harvest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarvestPlan {
    pub mode: QueryMode,
    pub resource_types: Vec<ResourceType>,
    pub partners: Vec<PartnerPublisher>,
    pub crossref_excluded_publishers: Vec<String>,
    pub ncbi_term: String,
    /// Continue when an optional source fails.
    pub allow_partial: bool,
}

impl Default for HarvestPlan {
    fn default() -> Self {
        HarvestPlan {
            mode: QueryMode::Full,
            resource_types: vec![ResourceType::Dataset, ResourceType::Software],
            partners: vec![],
            crossref_excluded_publishers: crate::sources::crossref::default_excluded_publishers(),
            ncbi_term: String::new(),
            allow_partial: false,
        }
    }
}

/// Clients for the sources taking part; `None` disables a source.
pub struct HarvestClients {
    pub datacite: DataciteClient,
    pub repos: Vec<RepoClient>,
    pub openalex: Option<OpenAlexClient>,
    pub crossref: Option<CrossrefClient>,
    pub ncbi: Option<NcbiClient>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceRun {
    pub name: String,
    pub source: SourceTag,
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
    pub status: SourceStatus,
    pub error: Option<String>,
    pub params: BTreeMap<String, String>,
    pub raw_count: usize,
    pub record_count: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossValidationSummary {
    pub repo: String,
    pub gained: usize,
    pub inverse: usize,
    /// Gained DOIs fetched from DataCite and confirmed as affiliated.
    pub added: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub doi: String,
    pub repo: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarvestManifest {
    pub started_at: DateTime<Utc>,
    pub finished_at: DateTime<Utc>,
    pub sources: Vec<SourceRun>,
    pub cross_validation: Vec<CrossValidationSummary>,
    /// Gained DOIs that could not be added.
    pub audit: Vec<AuditEntry>,
    pub merged_count: usize,
    pub partial: bool,
}

impl HarvestManifest {
    pub fn source_tags(&self) -> BTreeSet<SourceTag> {
        self.sources.iter().filter(|s| s.status == SourceStatus::Ok).map(|s| s.source).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarvestOutcome {
    /// Per-source record streams, before merging.
    pub streams: BTreeMap<String, Vec<DatasetRecord>>,
    pub corpus: Vec<DatasetRecord>,
    pub manifest: HarvestManifest,
}

#[derive(Debug, thiserror::Error)]
#[error("source {source_name} failed: {error}")]
pub struct HarvestError {
    pub source_name: String,
    #[source]
    pub error: SourceError,
}

struct Step {
    name: String,
    tag: SourceTag,
    params: BTreeMap<String, String>,
    started_at: DateTime<Utc>,
    result: Result<SourceBatch, SourceError>,
}

fn run_step(
    name: &str,
    tag: SourceTag,
    params: &[(&str, String)],
    f: impl FnOnce() -> Result<SourceBatch, SourceError>,
) -> Step {
    let started_at = Utc::now();
    Step {
        name: name.to_string(),
        tag,
        params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        started_at,
        result: f(),
    }
}

fn types_param(types: &[ResourceType]) -> String {
    types.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(",")
}

/// Full harvest. DataCite failures always abort; other sources abort the
/// run unless `plan.allow_partial` is set, in which case they are reported
/// in the manifest.
pub fn run_primary_harvest(
    profile: &InstitutionProfile,
    plan: &HarvestPlan,
    clients: &HarvestClients,
) -> Result<HarvestOutcome, HarvestError> {
    let started_at = Utc::now();
    let matcher = InstitutionMatcher::new(profile);
    let names = RepositoryNames::default();
    let mut runs: Vec<SourceRun> = Vec::new();
    let mut streams: BTreeMap<String, Vec<DatasetRecord>> = BTreeMap::new();
    let mut fetch_failures = false;

    let record_step = |step: Step, runs: &mut Vec<SourceRun>, streams: &mut BTreeMap<String, Vec<DatasetRecord>>, fatal: bool| -> Result<(), HarvestError> {
        let finished_at = Utc::now();
        match step.result {
            Ok(batch) => {
                runs.push(SourceRun {
                    name: step.name.clone(),
                    source: step.tag,
                    started_at: step.started_at,
                    finished_at,
                    status: SourceStatus::Ok,
                    error: None,
                    params: step.params,
                    raw_count: batch.raw_count,
                    record_count: batch.records.len(),
                    warnings: batch.warnings,
                });
                streams.entry(step.name).or_default().extend(batch.records);
                Ok(())
            }
            Err(error) => {
                log::error!("{} failed: {error}", step.name);
                if fatal || !plan.allow_partial {
                    return Err(HarvestError { source_name: step.name, error });
                }
                runs.push(SourceRun {
                    name: step.name,
                    source: step.tag,
                    started_at: step.started_at,
                    finished_at,
                    status: SourceStatus::Failed,
                    error: Some(error.to_string()),
                    params: step.params,
                    raw_count: 0,
                    record_count: 0,
                    warnings: vec![],
                });
                Ok(())
            }
        }
    };

    // DataCite institution search.
    let mode = format!("{:?}", plan.mode).to_lowercase();
    let step = run_step(
        "datacite",
        SourceTag::DataciteGeneral,
        &[("mode", mode), ("resource_types", types_param(&plan.resource_types))],
        || clients.datacite.query(profile, &plan.resource_types, plan.mode),
    );
    record_step(step, &mut runs, &mut streams, true)?;
    let datacite_records = streams.get("datacite").cloned().unwrap_or_default();
    let all_datacite: BTreeSet<String> = datacite_records.iter().map(|r| r.doi.clone()).collect();

    // Repository cross-validation: gained DOIs are fetched from DataCite.
    let mut summaries = Vec::new();
    let mut audit = Vec::new();
    for repo in &clients.repos {
        let ep = repo.endpoint();
        if !ep.source.enabled {
            continue;
        }
        let name = format!("repo:{}", ep.name);
        let step = run_step(&name, SourceTag::RepoCrossValidation, &[("kind", format!("{:?}", ep.kind).to_lowercase())], || {
            repo.query(profile)
        });
        let repo_dois: BTreeSet<String> = match &step.result {
            Ok(b) => b.records.iter().map(|r| r.doi.clone()).collect(),
            Err(_) => BTreeSet::new(),
        };
        let ok = step.result.is_ok();
        // The repository's own records are only used for the diff.
        let step = Step { result: step.result.map(|b| SourceBatch { records: vec![], ..b }), ..step };
        record_step(step, &mut runs, &mut streams, false)?;
        if !ok {
            continue;
        }
        let in_repo: BTreeSet<String> = datacite_records
            .iter()
            .filter(|r| names.repository_for(r) == ep.name)
            .map(|r| r.doi.clone())
            .collect();
        let mut diff = cross_validate(&in_repo, &repo_dois, &ep.name);
        diff.gained.retain(|d| !all_datacite.contains(d));
        let mut added = Vec::new();
        for doi in &diff.gained {
            match clients.datacite.fetch_doi(doi) {
                Ok(mut r) => {
                    r.source = SourceTag::RepoCrossValidation;
                    r.r#match = matcher.match_record(&r);
                    let by_ror = r
                        .creators
                        .iter()
                        .chain(&r.contributors)
                        .flat_map(|a| &a.affiliation_identifiers)
                        .any(|id| id.eq_ignore_ascii_case(&profile.ror_id));
                    if r.r#match.is_some() || by_ror {
                        added.push(r);
                    } else {
                        audit.push(AuditEntry {
                            doi: doi.clone(),
                            repo: ep.name.clone(),
                            reason: "DataCite metadata lacks the institution".into(),
                        });
                    }
                }
                Err(SourceError::NotFound(_)) => audit.push(AuditEntry {
                    doi: doi.clone(),
                    repo: ep.name.clone(),
                    reason: "not registered with DataCite".into(),
                }),
                Err(SourceError::MalformedDoi(e)) => audit.push(AuditEntry {
                    doi: doi.clone(),
                    repo: ep.name.clone(),
                    reason: e.to_string(),
                }),
                Err(error) => {
                    if !plan.allow_partial {
                        return Err(HarvestError { source_name: name, error });
                    }
                    fetch_failures = true;
                    audit.push(AuditEntry { doi: doi.clone(), repo: ep.name.clone(), reason: error.to_string() });
                }
            }
        }
        summaries.push(CrossValidationSummary {
            repo: ep.name.clone(),
            gained: diff.gained.len(),
            inverse: diff.inverse.len(),
            added: added.len(),
        });
        streams.entry(name).or_default().extend(added);
    }

    // Optional sources are independent of each other.
    let (mediated, crossref, ncbi) = std::thread::scope(|s| {
        let mediated = s.spawn(|| {
            clients.openalex.as_ref().map(|oa| {
                let partners: Vec<String> = plan.partners.iter().map(|p| p.name.clone()).collect();
                run_step("mediated", SourceTag::DataciteOpenalex, &[("partners", partners.join("|"))], || {
                    let ids: Vec<String> = plan.partners.iter().map(|p| p.openalex_id.clone()).collect();
                    let articles = oa.affiliated_articles(&profile.ror_id, &ids)?;
                    let articles: Vec<String> = articles.into_iter().map(|a| a.article_doi).collect();
                    let candidates = fetch_partner_datasets(&clients.datacite, &plan.partners)?;
                    let joined = join_on_article_doi(&candidates.records, &articles);
                    Ok(SourceBatch { records: joined, ..candidates })
                })
            })
        });
        let crossref = s.spawn(|| {
            clients.crossref.as_ref().map(|c| {
                run_step("crossref", SourceTag::Crossref, &[("affiliation", profile.crossref_affiliation_query.clone())], || {
                    let b = c.query(profile)?;
                    let records = post_filter(b.records.clone(), profile, &plan.crossref_excluded_publishers);
                    Ok(SourceBatch { records, ..b })
                })
            })
        });
        let ncbi = s.spawn(|| {
            clients.ncbi.as_ref().map(|n| {
                run_step("ncbi", SourceTag::Ncbi, &[("term", plan.ncbi_term.clone())], || {
                    let mut b = n.bioprojects(&plan.ncbi_term)?;
                    for r in &mut b.records {
                        r.r#match = matcher.match_record(r);
                    }
                    Ok(b)
                })
            })
        });
        (
            mediated.join().expect("mediated worker panicked"),
            crossref.join().expect("crossref worker panicked"),
            ncbi.join().expect("ncbi worker panicked"),
        )
    });
    for step in [mediated, crossref, ncbi].into_iter().flatten() {
        record_step(step, &mut runs, &mut streams, false)?;
    }

    let partial = fetch_failures || runs.iter().any(|r| r.status == SourceStatus::Failed);
    let corpus = merge_records(streams.values().cloned().collect());
    let manifest = HarvestManifest {
        started_at,
        finished_at: Utc::now(),
        sources: runs,
        cross_validation: summaries,
        audit,
        merged_count: corpus.len(),
        partial,
    };
    Ok(HarvestOutcome { streams, corpus, manifest })
}
