#![allow(dead_code)]

pub mod mirrors;
pub mod oracle;
pub mod synth;

use std::path::PathBuf;

use datahunt_core::cleaning::{run_cleaning_pipeline, CleaningOptions, CleaningOutcome};
use datahunt_core::corpus::load_jsonl;
use datahunt_core::model::DatasetRecord;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn records(name: &str) -> Vec<DatasetRecord> {
    load_jsonl(&fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn clean(records: Vec<DatasetRecord>) -> CleaningOutcome {
    run_cleaning_pipeline(records, &CleaningOptions::default())
}

pub fn clean_with_partial(records: Vec<DatasetRecord>) -> CleaningOutcome {
    let opts = CleaningOptions { dataverse_partial_dedup: true, ..CleaningOptions::default() };
    run_cleaning_pipeline(records, &opts)
}

/// Every corpus the cleaning invariants are checked on.
pub fn cleaning_fixtures() -> Vec<(String, Vec<DatasetRecord>)> {
    let mut out = vec![
        ("tdr".to_string(), mirrors::tdr()),
        ("zenodo".to_string(), mirrors::zenodo()),
        ("designsafe".to_string(), mirrors::designsafe()),
        ("emsl".to_string(), mirrors::emsl()),
        ("mediated".to_string(), records("mediated_records.jsonl")),
        ("dryad".to_string(), records("dryad_records.jsonl")),
        ("drift_snapshot".to_string(), records("rads_drift_snapshot.jsonl")),
    ];
    for seed in 0..10 {
        out.push((format!("synthetic-{seed}"), synth::corpus(seed, 200)));
    }
    out
}
