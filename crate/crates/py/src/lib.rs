//! Python bindings. Records and reports cross the boundary as plain
//! dicts and lists, converted through JSON.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::de::DeserializeOwned;
use serde::Serialize;

use datahunt_core::assess::dates::audit_date_discordance;
use datahunt_core::assess::drift::{audit_affiliation_drift, SnapshotFetcher};
use datahunt_core::assess::Assessment;
use datahunt_core::cleaning::{run_cleaning_pipeline, CleaningOptions};
use datahunt_core::config::{AssessmentSettings, RunConfig};
use datahunt_core::matching::InstitutionMatcher;
use datahunt_core::mediated::{join_on_article_doi, SiKind, SiSuffix};
use datahunt_core::model::{DatasetRecord, InstitutionProfile};
use datahunt_core::rads::{read_rads, reanalyze};
use datahunt_core::sources::crossref;
use datahunt_core::tabular::CsvInput;
use datahunt_core::text;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(v).map_err(value_err)?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let s: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&s).map_err(value_err)
}

/// Institution name variants, identifiers and matching switches.
#[pyclass(name = "InstitutionProfile", module = "datahunt", from_py_object)]
#[derive(Clone)]
struct PyProfile {
    inner: InstitutionProfile,
}

#[pymethods]
impl PyProfile {
    #[new]
    #[pyo3(signature = (official_name, permutations, ror_id, crossref_affiliation_query=None))]
    fn new(official_name: String, permutations: Vec<String>, ror_id: String, crossref_affiliation_query: Option<String>) -> PyResult<Self> {
        let inner = InstitutionProfile {
            crossref_affiliation_query: crossref_affiliation_query.unwrap_or_else(|| official_name.clone()),
            official_name,
            permutations,
            ror_id,
            openalex_id: String::new(),
            misspellings_enabled: false,
            misspellings: vec![],
            exclusion_substrings: vec![],
            query_variants: vec![],
        };
        inner.validate().map_err(value_err)?;
        Ok(PyProfile { inner })
    }

    #[staticmethod]
    fn ut_austin() -> Self {
        PyProfile { inner: InstitutionProfile::ut_austin() }
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let inner: InstitutionProfile = toml::from_str(text).map_err(value_err)?;
        inner.validate().map_err(value_err)?;
        Ok(PyProfile { inner })
    }

    #[getter]
    fn official_name(&self) -> String {
        self.inner.official_name.clone()
    }

    #[getter]
    fn permutations(&self) -> Vec<String> {
        self.inner.permutations.clone()
    }

    #[getter]
    fn ror_id(&self) -> String {
        self.inner.ror_id.clone()
    }

    /// Permutation matched by `text`, or None.
    fn match_text(&self, text: &str) -> Option<String> {
        InstitutionMatcher::new(&self.inner).match_str(text).map(|(m, _)| m.to_string())
    }

    /// Match evidence for a record dict, or None.
    fn match_record(&self, py: Python<'_>, record: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
        let r: DatasetRecord = from_py(record)?;
        to_py(py, &InstitutionMatcher::new(&self.inner).match_record(&r))
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!("InstitutionProfile({:?}, {} permutations)", self.inner.official_name, self.inner.permutations.len())
    }
}

#[pyfunction]
fn normalize_doi(raw: &str) -> PyResult<String> {
    text::normalize_doi(raw).map_err(value_err)
}

#[pyfunction]
fn normalize_text(raw: &str) -> String {
    text::normalize_text(raw)
}

/// Full run configuration as a dict, after validation.
#[pyfunction]
fn load_config(py: Python<'_>, path: PathBuf) -> PyResult<Py<PyAny>> {
    let cfg = RunConfig::load(&path).map_err(value_err)?;
    to_py(py, &cfg)
}

/// Runs the cleaning pipeline. Returns `(records, report)`.
#[pyfunction]
#[pyo3(signature = (records, dataverse_partial_dedup=false, designsafe_filter=true))]
fn clean(py: Python<'_>, records: &Bound<'_, PyAny>, dataverse_partial_dedup: bool, designsafe_filter: bool) -> PyResult<(Py<PyAny>, Py<PyAny>)> {
    let records: Vec<DatasetRecord> = from_py(records)?;
    let opts = CleaningOptions { dataverse_partial_dedup, designsafe_filter, ..CleaningOptions::default() };
    let out = py.detach(|| run_cleaning_pipeline(records, &opts));
    Ok((to_py(py, &out.records)?, to_py(py, &out.report)?))
}

/// Per-record assessment plus summary counts.
#[pyfunction]
fn assess(py: Python<'_>, records: &Bound<'_, PyAny>, profile: &PyProfile) -> PyResult<Py<PyAny>> {
    let records: Vec<DatasetRecord> = from_py(records)?;
    let a = Assessment::build(&records, &profile.inner, &AssessmentSettings::default());
    #[derive(Serialize)]
    struct Summary<'a> {
        records: &'a [datahunt_core::assess::RecordAssessment],
        repositories: BTreeMap<&'a str, usize>,
        licenses: BTreeMap<&'a str, usize>,
        software: BTreeMap<&'static str, usize>,
        volume: Vec<(i32, &'a str, usize)>,
    }
    let summary = Summary {
        records: &a.records,
        repositories: a.repository_counts(),
        licenses: a.license_counts(),
        software: a.software_counts().into_iter().map(|(k, n)| (k.as_str(), n)).collect(),
        volume: a.volume.counts.iter().map(|((y, r), n)| (*y, r.as_str(), *n)).collect(),
    };
    to_py(py, &summary)
}

/// Parses Crossref work items and keeps the institution's own datasets.
#[pyfunction]
#[pyo3(signature = (items, profile, excluded_publishers=None))]
fn crossref_post_filter(py: Python<'_>, items: &Bound<'_, PyAny>, profile: &PyProfile, excluded_publishers: Option<Vec<String>>) -> PyResult<Py<PyAny>> {
    let items: Vec<serde_json::Value> = from_py(items)?;
    let parsed: Vec<DatasetRecord> = items.iter().map(crossref::parse_item).collect::<Result<_, _>>().map_err(value_err)?;
    let excluded = excluded_publishers.unwrap_or_else(crossref::default_excluded_publishers);
    to_py(py, &crossref::post_filter(parsed, &profile.inner, &excluded))
}

/// Mediated records whose supplemented article is in `articles`.
#[pyfunction]
fn join_mediated(py: Python<'_>, records: &Bound<'_, PyAny>, articles: Vec<String>) -> PyResult<Py<PyAny>> {
    let records: Vec<DatasetRecord> = from_py(records)?;
    to_py(py, &join_on_article_doi(&records, &articles))
}

/// `(article_doi, kind, n)` for a supplementary-information DOI, or None.
#[pyfunction]
fn parse_si_suffix(doi: &str) -> Option<(String, String, u16)> {
    SiSuffix::parse(doi).map(|s| {
        let kind = if s.kind == SiKind::S { "s" } else { "t" };
        (s.article_doi, kind.to_string(), s.n)
    })
}

#[pyfunction]
#[pyo3(signature = (article_doi, kind="s", max_n=10))]
fn si_candidates(article_doi: &str, kind: &str, max_n: u16) -> PyResult<Vec<String>> {
    let kind = match kind {
        "s" | "S" => SiKind::S,
        "t" | "T" => SiKind::T,
        other => return Err(value_err(format!("unknown suffix kind {other:?}"))),
    };
    Ok(SiSuffix::candidates(article_doi, kind, max_n))
}

/// Version removal and article consolidation over a RADS CSV export.
#[pyfunction]
fn rads_reanalyze(py: Python<'_>, path: PathBuf) -> PyResult<Py<PyAny>> {
    let input = CsvInput::open(&path).map_err(|e| PyIOError::new_err(e.to_string()))?;
    let rows = read_rads(&input).map_err(value_err)?;
    to_py(py, &reanalyze(&rows))
}

/// Compares publication years with repository-reported dates.
#[pyfunction]
fn audit_dates(py: Python<'_>, records: &Bound<'_, PyAny>, repo_dates: BTreeMap<String, String>) -> PyResult<Py<PyAny>> {
    let records: Vec<DatasetRecord> = from_py(records)?;
    to_py(py, &audit_date_discordance(&records, &repo_dates))
}

/// Seeded drift audit against a snapshot of current records.
#[pyfunction]
fn audit_drift(
    py: Python<'_>,
    dois: Vec<(String, String)>,
    profile: &PyProfile,
    snapshot: &Bound<'_, PyAny>,
    sample_size: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let snapshot: Vec<DatasetRecord> = from_py(snapshot)?;
    let fetcher = SnapshotFetcher::new(snapshot);
    let report = audit_affiliation_drift(&dois, &profile.inner, sample_size, seed, &fetcher).map_err(value_err)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv).map_err(value_err)?;
    let d = to_py(py, &report)?;
    d.bind(py).set_item("csv", String::from_utf8_lossy(&csv).into_owned())?;
    Ok(d)
}

#[pymodule]
fn datahunt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProfile>()?;
    m.add_function(wrap_pyfunction!(normalize_doi, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_text, m)?)?;
    m.add_function(wrap_pyfunction!(load_config, m)?)?;
    m.add_function(wrap_pyfunction!(clean, m)?)?;
    m.add_function(wrap_pyfunction!(assess, m)?)?;
    m.add_function(wrap_pyfunction!(crossref_post_filter, m)?)?;
    m.add_function(wrap_pyfunction!(join_mediated, m)?)?;
    m.add_function(wrap_pyfunction!(parse_si_suffix, m)?)?;
    m.add_function(wrap_pyfunction!(si_candidates, m)?)?;
    m.add_function(wrap_pyfunction!(rads_reanalyze, m)?)?;
    m.add_function(wrap_pyfunction!(audit_dates, m)?)?;
    m.add_function(wrap_pyfunction!(audit_drift, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
