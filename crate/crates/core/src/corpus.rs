//! Corpus persistence. JSON Lines is the lossless format read back by every
//! command; the CSV export is a flat view for spreadsheets.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::SchemaError;
use crate::model::DatasetRecord;

pub const CSV_COLUMNS: [&str; 19] = [
    "doi",
    "source",
    "registry",
    "repository",
    "publisher_raw",
    "title",
    "first_author",
    "last_author",
    "match_field",
    "matched_permutation",
    "publication_year",
    "registered",
    "resource_type",
    "rights",
    "formats",
    "related_identifiers",
    "consolidation_group",
    "retained",
    "drop_reason",
];

pub fn read_jsonl<R: BufRead>(file: &str, r: R) -> Result<Vec<DatasetRecord>, SchemaError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|source| SchemaError::Io { file: file.to_string(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| SchemaError::BadRow {
            file: file.to_string(),
            line: i as u64 + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn load_jsonl(path: &Path) -> Result<Vec<DatasetRecord>, SchemaError> {
    let file = path.display().to_string();
    let f = std::fs::File::open(path).map_err(|source| SchemaError::Io { file: file.clone(), source })?;
    read_jsonl(&file, std::io::BufReader::new(f))
}

pub fn write_jsonl<W: Write>(mut w: W, records: &[DatasetRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn save_jsonl(path: &Path, records: &[DatasetRecord]) -> std::io::Result<()> {
    write_jsonl(std::io::BufWriter::new(std::fs::File::create(path)?), records)
}

/// One CSV row in [`CSV_COLUMNS`] order. Related identifiers become
/// `relation:identifier` pairs joined by `|`.
pub fn csv_row(r: &DatasetRecord) -> Vec<String> {
    let (field, permutation) = match &r.r#match {
        Some(m) => (m.field.as_str().to_string(), m.matched_permutation.clone()),
        None => (String::new(), String::new()),
    };
    vec![
        r.doi.clone(),
        r.source.as_str().to_string(),
        r.registry.as_str().to_string(),
        r.repository.clone(),
        r.publisher_raw.clone(),
        r.title.clone(),
        r.creators.first().map(|a| a.name.clone()).unwrap_or_default(),
        r.creators.last().map(|a| a.name.clone()).unwrap_or_default(),
        field,
        permutation,
        r.publication_year.map(|y| y.to_string()).unwrap_or_default(),
        r.registered.clone().unwrap_or_default(),
        r.resource_type_general.clone(),
        r.rights_identifiers.join("|"),
        r.formats.join("|"),
        r.related_identifiers
            .iter()
            .map(|x| format!("{}:{}", x.relation_type, x.identifier))
            .collect::<Vec<_>>()
            .join("|"),
        r.consolidation_group.clone().unwrap_or_default(),
        r.retained.to_string(),
        r.drop_reason.clone().unwrap_or_default(),
    ]
}

pub fn write_csv<W: Write>(w: W, records: &[DatasetRecord]) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_COLUMNS)?;
    for r in records {
        out.write_record(csv_row(r))?;
    }
    out.flush()?;
    Ok(())
}
