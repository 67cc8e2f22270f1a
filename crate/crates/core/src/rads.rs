//! Reanalysis of an archived multi-institution discovery corpus: how many
//! of its Figshare dataset rows survive version removal and per-article
//! consolidation.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::SchemaError;
use crate::model::RelatedIdentifier;
use crate::tabular::CsvInput;

pub const COLUMNS: [&str; 6] = ["doi", "institution", "publisher", "resourceTypeGeneral", "publicationDate", "relatedIdentifiers"];

static VERSION_SUFFIX: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\.v\d+$").unwrap());

/// One (DOI, institution) row. A DOI credited to several institutions
/// appears once per institution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadsRow {
    pub doi: String,
    pub institution: String,
    pub publisher: String,
    pub resource_type_general: String,
    /// Kept as written; consolidation compares the text.
    pub publication_date: String,
    /// In source order.
    pub related: Vec<RelatedIdentifier>,
}

impl RadsRow {
    pub fn is_version(&self) -> bool {
        is_version_doi(&self.doi)
    }

    pub fn supplemented_articles(&self) -> impl Iterator<Item = String> + '_ {
        self.related.iter().filter(|r| r.is("IsSupplementTo")).filter_map(RelatedIdentifier::doi)
    }
}

pub fn is_version_doi(doi: &str) -> bool {
    VERSION_SUFFIX.is_match(doi.trim())
}

/// Parses `relation:identifier` pairs joined by `|`. `NA` and empty cells
/// mean no relations.
pub fn parse_related(cell: &str) -> Result<Vec<RelatedIdentifier>, String> {
    let cell = cell.trim();
    if cell.is_empty() || cell == "NA" {
        return Ok(Vec::new());
    }
    cell.split('|')
        .map(|pair| {
            let (rel, id) = pair.split_once(':').ok_or_else(|| format!("related identifier {pair:?} lacks a relation"))?;
            let id = id.trim();
            let kind = if id.starts_with("10.") || id.contains("doi.org/") { "DOI" } else { "" };
            Ok(RelatedIdentifier::new(rel.trim(), id, kind))
        })
        .collect()
}

pub fn read_rads(input: &CsvInput) -> Result<Vec<RadsRow>, SchemaError> {
    let idx: Vec<usize> = COLUMNS.iter().map(|c| input.column(c)).collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(input.len());
    for (line, row) in input.rows() {
        let cell = |i: usize| row.get(idx[i]).unwrap_or("").trim().to_string();
        let doi = cell(0).to_lowercase();
        if doi.is_empty() {
            return Err(input.bad_row(line, "empty doi"));
        }
        let related = parse_related(&cell(5)).map_err(|m| input.bad_row(line, m))?;
        out.push(RadsRow {
            doi,
            institution: cell(1),
            publisher: cell(2),
            resource_type_general: cell(3),
            publication_date: cell(4),
            related,
        });
    }
    Ok(out)
}

/// Rows typed Dataset whose publisher is Figshare itself. Deposits listing
/// a partner publisher are left out.
pub fn figshare_datasets(rows: &[RadsRow]) -> Vec<RadsRow> {
    rows.iter()
        .filter(|r| r.publisher.eq_ignore_ascii_case("figshare") && r.resource_type_general.eq_ignore_ascii_case("dataset"))
        .cloned()
        .collect()
}

pub fn remove_versions(rows: &[RadsRow]) -> Vec<RadsRow> {
    rows.iter().filter(|r| !r.is_version()).cloned().collect()
}

/// One row per (institution, publication date, full related list); the
/// smallest DOI represents each group.
pub fn consolidate(rows: &[RadsRow]) -> Vec<RadsRow> {
    let mut groups: BTreeMap<(&str, &str, &[RelatedIdentifier]), &RadsRow> = BTreeMap::new();
    for r in rows {
        let key = (r.institution.as_str(), r.publication_date.as_str(), r.related.as_slice());
        groups
            .entry(key)
            .and_modify(|cur| {
                if r.doi < cur.doi {
                    *cur = r;
                }
            })
            .or_insert(r);
    }
    let mut out: Vec<RadsRow> = groups.into_values().cloned().collect();
    out.sort_by(|a, b| (&a.institution, &a.doi).cmp(&(&b.institution, &b.doi)));
    out
}

pub fn unique_articles(rows: &[RadsRow]) -> BTreeSet<String> {
    rows.iter().flat_map(RadsRow::supplemented_articles).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstitutionCounts {
    pub institution: String,
    pub reported: usize,
    pub versions_removed: usize,
    pub consolidated: usize,
}

impl InstitutionCounts {
    pub fn retained_after_versions(&self) -> f64 {
        if self.reported == 0 {
            0.0
        } else {
            self.versions_removed as f64 / self.reported as f64
        }
    }

    pub fn retained_after_consolidation(&self) -> f64 {
        if self.reported == 0 {
            0.0
        } else {
            self.consolidated as f64 / self.reported as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadsReanalysis {
    pub figshare_rows: usize,
    pub after_versions: usize,
    pub articles: usize,
    pub consolidated: usize,
    pub institutions: Vec<InstitutionCounts>,
}

impl RadsReanalysis {
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["institution", "reported", "versions_removed", "consolidated"])?;
        for c in &self.institutions {
            out.write_record([
                c.institution.clone(),
                c.reported.to_string(),
                c.versions_removed.to_string(),
                c.consolidated.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn reanalyze(rows: &[RadsRow]) -> RadsReanalysis {
    let slice = figshare_datasets(rows);
    let parents = remove_versions(&slice);
    let merged = consolidate(&parents);

    let mut per: BTreeMap<String, InstitutionCounts> = BTreeMap::new();
    let mut bump = |inst: &str, f: fn(&mut InstitutionCounts)| {
        let e = per.entry(inst.to_string()).or_insert_with(|| InstitutionCounts {
            institution: inst.to_string(),
            reported: 0,
            versions_removed: 0,
            consolidated: 0,
        });
        f(e);
    };
    slice.iter().for_each(|r| bump(&r.institution, |c| c.reported += 1));
    parents.iter().for_each(|r| bump(&r.institution, |c| c.versions_removed += 1));
    merged.iter().for_each(|r| bump(&r.institution, |c| c.consolidated += 1));

    // Distinct DOIs, since a multi-institution DOI is one deposit.
    let distinct = |rs: &[RadsRow]| rs.iter().map(|r| r.doi.as_str()).collect::<BTreeSet<_>>().len();
    RadsReanalysis {
        figshare_rows: distinct(&slice),
        after_versions: distinct(&parents),
        articles: unique_articles(&parents).len(),
        consolidated: merged.len(),
        institutions: per.into_values().collect(),
    }
}
