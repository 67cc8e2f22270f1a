//! Per-record assessment and the summary tables built from it.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{detect_software_content, normalize_license, score_title, AuthorshipClassifier, AuthorshipPosition, SoftwareContent};
use crate::assess::annual_volume;
use crate::config::AssessmentSettings;
use crate::model::{DatasetRecord, InstitutionProfile};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordAssessment {
    pub doi: String,
    pub repository: String,
    pub authorship: AuthorshipPosition,
    pub organizational_only: bool,
    pub license: String,
    pub software_license: bool,
    pub license_conflict: bool,
    pub software: SoftwareContent,
    pub title_tokens: usize,
    pub descriptive_tokens: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assessment {
    pub records: Vec<RecordAssessment>,
    /// Undated records are left out of the volume table.
    pub volume: super::VolumeTable,
}

fn count<K: Ord>(it: impl Iterator<Item = K>) -> BTreeMap<K, usize> {
    let mut m = BTreeMap::new();
    for k in it {
        *m.entry(k).or_default() += 1;
    }
    m
}

impl Assessment {
    /// Retained records only.
    pub fn build(records: &[DatasetRecord], profile: &InstitutionProfile, settings: &AssessmentSettings) -> Self {
        let authorship = AuthorshipClassifier::new(profile);
        let kept: Vec<DatasetRecord> = records.iter().filter(|r| r.retained).cloned().collect();
        let rows = kept
            .iter()
            .map(|r| {
                let a = authorship.classify(r);
                let l = normalize_license(&r.rights_identifiers, &settings.licenses);
                let t = score_title(&r.title, &settings.nondescript_words);
                RecordAssessment {
                    doi: r.doi.clone(),
                    repository: r.repository.clone(),
                    authorship: a.position,
                    organizational_only: a.organizational_only,
                    license: l.canonical,
                    software_license: l.is_software_license,
                    license_conflict: l.conflict,
                    software: detect_software_content(r, &settings.software),
                    title_tokens: t.token_count,
                    descriptive_tokens: t.descriptive_token_count,
                }
            })
            .collect();
        Assessment { records: rows, volume: annual_volume(&kept, &[]) }
    }

    pub fn repository_counts(&self) -> BTreeMap<&str, usize> {
        count(self.records.iter().map(|r| r.repository.as_str()))
    }

    pub fn software_counts(&self) -> BTreeMap<SoftwareContent, usize> {
        count(self.records.iter().map(|r| r.software))
    }

    pub fn license_counts(&self) -> BTreeMap<&str, usize> {
        count(self.records.iter().map(|r| r.license.as_str()))
    }

    pub fn authorship_counts(&self) -> BTreeMap<(&str, AuthorshipPosition), usize> {
        count(self.records.iter().map(|r| (r.repository.as_str(), r.authorship)))
    }

    pub fn write_records_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "doi",
            "repository",
            "authorship",
            "organizational_only",
            "license",
            "software_license",
            "license_conflict",
            "software_content",
            "title_tokens",
            "descriptive_tokens",
        ])?;
        for r in &self.records {
            out.write_record([
                r.doi.clone(),
                r.repository.clone(),
                r.authorship.as_str().into(),
                r.organizational_only.to_string(),
                r.license.clone(),
                r.software_license.to_string(),
                r.license_conflict.to_string(),
                r.software.as_str().into(),
                r.title_tokens.to_string(),
                r.descriptive_tokens.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Writes every table into `dir` and returns the paths written.
    pub fn write_dir(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut table = |name: &str, header: &[&str], rows: Vec<Vec<String>>| -> std::io::Result<()> {
            let path = dir.join(name);
            let mut out = csv::Writer::from_path(&path)?;
            out.write_record(header)?;
            for r in rows {
                out.write_record(r)?;
            }
            out.flush()?;
            written.push(path);
            Ok(())
        };
        table(
            "repositories.csv",
            &["repository", "count"],
            self.repository_counts().into_iter().map(|(k, n)| vec![k.to_string(), n.to_string()]).collect(),
        )?;
        table(
            "authorship.csv",
            &["repository", "position", "count"],
            self.authorship_counts().into_iter().map(|((r, p), n)| vec![r.to_string(), p.as_str().into(), n.to_string()]).collect(),
        )?;
        table(
            "licenses.csv",
            &["license", "count"],
            self.license_counts().into_iter().map(|(k, n)| vec![k.to_string(), n.to_string()]).collect(),
        )?;
        table(
            "software.csv",
            &["software_content", "count"],
            self.software_counts().into_iter().map(|(k, n)| vec![k.as_str().into(), n.to_string()]).collect(),
        )?;
        let path = dir.join("volume.csv");
        self.volume.write_csv(std::fs::File::create(&path)?)?;
        written.push(path);
        let path = dir.join("record_assessment.csv");
        self.write_records_csv(std::fs::File::create(&path)?)?;
        written.push(path);
        Ok(written)
    }
}
