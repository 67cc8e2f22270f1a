//! Publication-year discordance between DataCite fields and repository APIs.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::SchemaError;
use crate::model::{year_of, DatasetRecord};
use crate::tabular::CsvInput;
use crate::text::normalize_doi;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateAuditRow {
    pub doi: String,
    pub year_datacite: Option<i32>,
    pub year_registered: Option<i32>,
    pub year_repo: Option<i32>,
    /// `None` when no comparison could be made.
    pub concordant: Option<bool>,
    /// Why a comparison was skipped.
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateAudit {
    pub rows: Vec<DateAuditRow>,
}

impl DateAudit {
    pub fn discordant(&self) -> impl Iterator<Item = &DateAuditRow> {
        self.rows.iter().filter(|r| r.concordant == Some(false))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let opt = |v: Option<i32>| v.map(|y| y.to_string()).unwrap_or_default();
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["doi", "year_datacite", "year_registered", "year_repo", "concordant", "note"])?;
        for r in &self.rows {
            let c = match r.concordant {
                Some(true) => "true",
                Some(false) => "false",
                None => "",
            };
            out.write_record([
                r.doi.clone(),
                opt(r.year_datacite),
                opt(r.year_registered),
                opt(r.year_repo),
                c.to_string(),
                r.note.clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Compares `publication_year` against the repository-reported date
/// (`repo_dates`, DOI to ISO date) and against the `registered` year.
/// A record is discordant when either available comparison disagrees.
pub fn audit_date_discordance(records: &[DatasetRecord], repo_dates: &BTreeMap<String, String>) -> DateAudit {
    let mut rows: Vec<DateAuditRow> = records
        .iter()
        .map(|r| {
            let year_datacite = r.publication_year;
            let year_registered = r.registered_year();
            let year_repo = repo_dates.get(&r.doi).and_then(|d| year_of(d));
            let mut notes = Vec::new();
            let mut checks = Vec::new();
            match (year_datacite, year_repo) {
                (Some(a), Some(b)) => checks.push(a == b),
                (_, None) if !repo_dates.is_empty() => notes.push("no repository date"),
                (None, _) => notes.push("no publicationYear"),
                _ => {}
            }
            match (year_datacite, year_registered) {
                (Some(a), Some(b)) => checks.push(a == b),
                (_, None) => notes.push("no registered date"),
                _ => {}
            }
            notes.dedup();
            DateAuditRow {
                doi: r.doi.clone(),
                year_datacite,
                year_registered,
                year_repo,
                concordant: (!checks.is_empty()).then(|| checks.iter().all(|&c| c)),
                note: notes.join("; "),
            }
        })
        .collect();
    rows.sort_by(|a, b| a.doi.cmp(&b.doi));
    DateAudit { rows }
}

/// Reads repository dates from a CSV with `doi` and `date` columns.
pub fn read_repo_dates(input: &CsvInput) -> Result<BTreeMap<String, String>, SchemaError> {
    let (d, t) = (input.column("doi")?, input.column("date")?);
    let mut out = BTreeMap::new();
    for (line, row) in input.rows() {
        let doi = normalize_doi(row.get(d).unwrap_or("")).map_err(|e| input.bad_row(line, e.to_string()))?;
        out.insert(doi, row.get(t).unwrap_or("").trim().to_string());
    }
    Ok(out)
}
