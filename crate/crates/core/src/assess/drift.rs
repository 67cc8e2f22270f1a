//! Affiliation drift: re-fetch a seeded sample of DOIs once attributed to
//! the institution and count those whose current metadata no longer match.

use std::collections::BTreeMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SourceError;
use crate::matching::InstitutionMatcher;
use crate::model::{DatasetRecord, InstitutionProfile};
use crate::sources::datacite::DataciteClient;

/// Current metadata for one DOI.
pub trait RecordFetcher {
    fn fetch(&self, doi: &str) -> Result<DatasetRecord, SourceError>;
}

impl RecordFetcher for DataciteClient {
    fn fetch(&self, doi: &str) -> Result<DatasetRecord, SourceError> {
        self.fetch_doi(doi)
    }
}

/// Records captured earlier, keyed by DOI; unknown DOIs are `NotFound`.
#[derive(Debug, Clone, Default)]
pub struct SnapshotFetcher {
    pub records: BTreeMap<String, DatasetRecord>,
}

impl SnapshotFetcher {
    pub fn new(records: impl IntoIterator<Item = DatasetRecord>) -> Self {
        SnapshotFetcher { records: records.into_iter().map(|r| (r.doi.clone(), r)).collect() }
    }
}

impl RecordFetcher for SnapshotFetcher {
    fn fetch(&self, doi: &str) -> Result<DatasetRecord, SourceError> {
        self.records.get(doi).cloned().ok_or_else(|| SourceError::NotFound(doi.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriftRow {
    pub repository: String,
    pub total: usize,
    pub unmatched: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriftReport {
    /// One row per repository, sorted by name.
    pub rows: Vec<DriftRow>,
    /// Sampled DOIs in draw order.
    pub sample: Vec<String>,
    pub errors: Vec<(String, String)>,
}

impl DriftReport {
    pub fn totals(&self) -> DriftRow {
        DriftRow {
            repository: "TOTAL".into(),
            total: self.rows.iter().map(|r| r.total).sum(),
            unmatched: self.rows.iter().map(|r| r.unmatched).sum(),
            errors: self.rows.iter().map(|r| r.errors).sum(),
        }
    }

    pub fn row(&self, repository: &str) -> Option<&DriftRow> {
        self.rows.iter().find(|r| r.repository == repository)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["repository", "total", "unmatched", "errors"])?;
        for r in self.rows.iter().chain(std::iter::once(&self.totals())) {
            out.write_record([r.repository.clone(), r.total.to_string(), r.unmatched.to_string(), r.errors.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Draws `sample_size` entries without replacement from `dois` (DOI and
/// the repository it was attributed to), re-fetches each and tabulates per
/// repository. The input is sorted first so only the seed decides the
/// sample.
pub fn audit_affiliation_drift(
    dois: &[(String, String)],
    profile: &InstitutionProfile,
    sample_size: usize,
    seed: u64,
    fetcher: &dyn RecordFetcher,
) -> Result<DriftReport, SourceError> {
    let mut pool: Vec<&(String, String)> = dois.iter().collect();
    pool.sort();
    pool.dedup_by(|a, b| a.0 == b.0);
    if sample_size > pool.len() {
        return Err(SourceError::InvalidRequest(format!(
            "sample size {sample_size} exceeds {} available DOIs",
            pool.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, pool.len(), sample_size);

    let matcher = InstitutionMatcher::new(profile);
    let mut rows: BTreeMap<String, DriftRow> = BTreeMap::new();
    let mut report = DriftReport::default();
    for i in picked.iter() {
        let (doi, repo) = pool[i];
        report.sample.push(doi.clone());
        let row = rows.entry(repo.clone()).or_insert_with(|| DriftRow {
            repository: repo.clone(),
            total: 0,
            unmatched: 0,
            errors: 0,
        });
        row.total += 1;
        match fetcher.fetch(doi) {
            Ok(rec) => {
                if matcher.match_record(&rec).is_none() {
                    row.unmatched += 1;
                }
            }
            Err(e) => {
                log::warn!("drift audit: {doi}: {e}");
                row.errors += 1;
                report.errors.push((doi.clone(), e.to_string()));
            }
        }
    }
    report.rows = rows.into_values().collect();
    Ok(report)
}
