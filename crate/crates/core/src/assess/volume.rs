//! Deposits per year and repository.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::model::DatasetRecord;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeTable {
    /// (year, repository) to count.
    pub counts: BTreeMap<(i32, String), usize>,
    /// DOIs counted from `publication_year` because `registered` was absent.
    pub fallback: Vec<String>,
    /// DOIs with no usable year at all.
    pub undated: Vec<String>,
}

impl VolumeTable {
    pub fn get(&self, year: i32, repository: &str) -> usize {
        self.counts.get(&(year, repository.to_string())).copied().unwrap_or(0)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["year", "repository", "count"])?;
        for ((y, r), n) in &self.counts {
            out.write_record([y.to_string(), r.clone(), n.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Counts by year of `registered`, falling back to `publication_year`.
/// An empty repository list means every repository.
pub fn annual_volume(records: &[DatasetRecord], repositories: &[String]) -> VolumeTable {
    let mut t = VolumeTable::default();
    for r in records {
        if !repositories.is_empty() && !repositories.contains(&r.repository) {
            continue;
        }
        let year = match (r.registered_year(), r.publication_year) {
            (Some(y), _) => y,
            (None, Some(y)) => {
                t.fallback.push(r.doi.clone());
                y
            }
            (None, None) => {
                t.undated.push(r.doi.clone());
                continue;
            }
        };
        *t.counts.entry((year, r.repository.clone())).or_default() += 1;
    }
    t.fallback.sort();
    t.undated.sort();
    t
}
