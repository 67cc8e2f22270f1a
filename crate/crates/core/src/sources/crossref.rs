//! Crossref REST API (`/works`) adapter and its affiliation post-filter.
//!
//! The affiliation search is fuzzy, so raw results are kept unverified and
//! [`post_filter`] applies exact institution matching afterwards.

use serde_json::Value;

use super::http::{HttpClient, Request, RetryPolicy};
use super::{jarr, jstr, SourceBatch, SourceConfig};
use crate::error::SourceError;
use crate::matching::InstitutionMatcher;
use crate::model::{Agent, DatasetRecord, InstitutionProfile, NameType, Registry, RelatedIdentifier, SourceTag};
use crate::text::{normalize_doi, normalize_text};

pub const DEFAULT_BASE_URL: &str = "https://api.crossref.org";

/// Publishers whose Crossref "datasets" are peer-review reports rather than
/// data.
pub const DEFAULT_EXCLUDED_PUBLISHERS: [&str; 3] = ["H1 Connect", "H1 Connects", "Faculty Opinions Ltd"];

pub struct CrossrefClient {
    http: HttpClient,
    cfg: SourceConfig,
}

impl CrossrefClient {
    pub fn new(http: HttpClient, cfg: SourceConfig) -> Self {
        http.limiter().configure(&cfg.host(), cfg.rate_limit, 1);
        let http = http.with_retry(RetryPolicy { max_retries: cfg.max_retries, ..Default::default() });
        CrossrefClient { http, cfg }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.http = self.http.with_retry(retry);
        self
    }

    pub fn request(&self, affiliation: &str, cursor: &str) -> Request {
        let mut r = Request::get(self.cfg.endpoint("works"))
            .query("query.affiliation", affiliation)
            .query("filter", "type:dataset")
            .query("rows", self.cfg.page_size.to_string())
            .query("cursor", cursor);
        if let Some(mail) = self.cfg.resolved_api_key() {
            r = r.query("mailto", mail);
        }
        r
    }

    /// Raw affiliation-search candidates, all tagged as Crossref.
    pub fn query(&self, profile: &InstitutionProfile) -> Result<SourceBatch, SourceError> {
        let affiliation = profile.crossref_affiliation_query.replace('+', " ");
        if affiliation.trim().is_empty() {
            return Err(SourceError::InvalidRequest("profile has no Crossref affiliation query".into()));
        }
        let mut batch = SourceBatch::default();
        let mut cursor = "*".to_string();
        let mut seen = 0usize;
        let mut total = None;
        loop {
            let req = self.request(&affiliation, &cursor);
            let page = self.http.get_json(&req)?;
            let msg = page.get("message").cloned().unwrap_or(Value::Null);
            if total.is_none() {
                total = msg.get("total-results").and_then(Value::as_u64);
            }
            let items = jarr(&msg, "items");
            if items.is_empty() {
                break;
            }
            seen += items.len();
            for item in items {
                match parse_item(item) {
                    Ok(r) => batch.records.push(r),
                    Err(e) => batch.warnings.push(format!("skipped Crossref item: {e}")),
                }
            }
            match jstr(&msg, "next-cursor") {
                Some(c) if c != cursor => cursor = c.to_string(),
                _ => break,
            }
        }
        batch.raw_count = seen;
        batch.check_total("Crossref affiliation query", seen, total);
        Ok(batch.finish())
    }
}

/// Crossref relation keys are kebab-case (`is-supplement-to`); DataCite
/// spells the same relation `IsSupplementTo`.
fn relation_name(kebab: &str) -> String {
    kebab
        .split('-')
        .map(|w| {
            let mut c = w.chars();
            match c.next() {
                Some(f) => f.to_uppercase().chain(c).collect::<String>(),
                None => String::new(),
            }
        })
        .collect()
}

fn date_parts(v: &Value, key: &str) -> Option<String> {
    let parts = v.get(key)?.get("date-parts")?.as_array()?.first()?.as_array()?;
    let nums: Vec<i64> = parts.iter().filter_map(Value::as_i64).collect();
    match nums.as_slice() {
        [y, m, d, ..] => Some(format!("{y:04}-{m:02}-{d:02}")),
        [y, m] => Some(format!("{y:04}-{m:02}")),
        [y] => Some(format!("{y:04}")),
        [] => None,
    }
}

pub fn parse_item(item: &Value) -> Result<DatasetRecord, String> {
    let doi = normalize_doi(jstr(item, "DOI").ok_or("missing DOI")?).map_err(|e| e.to_string())?;
    let mut r = DatasetRecord::new(doi, SourceTag::Crossref);
    r.registry = Registry::Crossref;
    r.publisher_raw = jstr(item, "publisher").unwrap_or_default().to_string();
    r.repository = r.publisher_raw.clone();
    r.title = item
        .get("title")
        .and_then(Value::as_array)
        .and_then(|a| a.first())
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    let agent = |a: &Value| -> Agent {
        let name = match (jstr(a, "family"), jstr(a, "given"), jstr(a, "name")) {
            (Some(f), Some(g), _) => format!("{f}, {g}"),
            (Some(f), None, _) => f.to_string(),
            (None, _, Some(n)) => n.to_string(),
            _ => String::new(),
        };
        Agent {
            name_type: if jstr(a, "family").is_some() { NameType::Personal } else { NameType::Unknown },
            name,
            affiliations: jarr(a, "affiliation").iter().filter_map(|x| jstr(x, "name")).map(str::to_string).collect(),
            affiliation_identifiers: vec![],
            orcid: jstr(a, "ORCID").and_then(Agent::parse_orcid),
        }
    };
    r.creators = jarr(item, "author").iter().map(agent).collect();
    r.contributors = jarr(item, "editor").iter().map(agent).collect();
    let published = date_parts(item, "published").or_else(|| date_parts(item, "issued"));
    r.publication_year = published.as_deref().and_then(crate::model::year_of);
    r.available = published.filter(|d| d.len() == 10);
    r.registered = item.pointer("/created/date-time").and_then(Value::as_str).map(str::to_string);
    r.updated = item.pointer("/deposited/date-time").and_then(Value::as_str).map(str::to_string);
    r.resource_type_general = match jstr(item, "type") {
        Some("dataset") => "Dataset".to_string(),
        Some(t) => t.to_string(),
        None => String::new(),
    };
    r.rights_identifiers = jarr(item, "license").iter().filter_map(|l| jstr(l, "URL")).map(str::to_string).collect();
    if let Some(rel) = item.get("relation").and_then(Value::as_object) {
        let mut keys: Vec<&String> = rel.keys().collect();
        keys.sort();
        for k in keys {
            let items = rel[k].as_array().map(Vec::as_slice).unwrap_or(&[]);
            for x in items {
                if let Some(id) = jstr(x, "id") {
                    r.related_identifiers.push(RelatedIdentifier::new(
                        &relation_name(k),
                        id,
                        &jstr(x, "id-type").unwrap_or_default().to_uppercase(),
                    ));
                }
            }
        }
    }
    Ok(r)
}

/// Keeps candidates with an exact institution match whose publisher is not
/// excluded; attaches the match evidence.
pub fn post_filter(
    records: Vec<DatasetRecord>,
    profile: &InstitutionProfile,
    excluded_publishers: &[String],
) -> Vec<DatasetRecord> {
    let matcher = InstitutionMatcher::new(profile);
    let excluded: Vec<String> = excluded_publishers.iter().map(|p| normalize_text(p)).collect();
    records
        .into_iter()
        .filter(|r| !excluded.contains(&normalize_text(&r.publisher_raw)))
        .filter_map(|mut r| {
            r.r#match = Some(matcher.match_record(&r)?);
            Some(r)
        })
        .collect()
}

pub fn default_excluded_publishers() -> Vec<String> {
    DEFAULT_EXCLUDED_PUBLISHERS.iter().map(|s| s.to_string()).collect()
}
