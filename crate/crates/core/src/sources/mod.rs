//! Adapters for the scholarly-metadata APIs. Every adapter goes through
//! [`http::HttpClient`], so all of them share per-host pacing, retries and
//! the record/replay cache.

pub mod cache;
pub mod crossref;
pub mod datacite;
pub mod http;
pub mod ncbi;
pub mod openalex;
pub mod ratelimit;
pub mod repos;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::DatasetRecord;

pub use cache::{cache_key, CacheMode, RawResponseCache};
pub use http::{HttpClient, Method, NetworkGuard, Request, Response, RetryPolicy, Transport};
pub use ratelimit::{Clock, RateLimiter, SystemClock, VirtualClock};

/// Connection settings for one source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    pub base_url: String,
    #[serde(default = "default_page_size")]
    pub page_size: u32,
    /// Requests per second to this source's host.
    #[serde(default = "default_rate")]
    pub rate_limit: f64,
    #[serde(default = "default_retries")]
    pub max_retries: u32,
    #[serde(default)]
    pub api_key: Option<String>,
    /// Environment variable consulted when `api_key` is unset.
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default)]
    pub api_key_required: bool,
    #[serde(default = "default_true")]
    pub enabled: bool,
    /// Maximum OR-clauses per search call (DataCite).
    #[serde(default = "default_chunk")]
    pub clause_chunk: usize,
    /// Free-form search term (NCBI, Dataverse).
    #[serde(default)]
    pub term: Option<String>,
}

fn default_page_size() -> u32 {
    100
}
fn default_rate() -> f64 {
    5.0
}
fn default_retries() -> u32 {
    3
}
fn default_true() -> bool {
    true
}
fn default_chunk() -> usize {
    20
}

impl SourceConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        SourceConfig {
            base_url: base_url.into(),
            page_size: default_page_size(),
            rate_limit: default_rate(),
            max_retries: default_retries(),
            api_key: None,
            api_key_env: None,
            api_key_required: false,
            enabled: true,
            clause_chunk: default_chunk(),
            term: None,
        }
    }

    pub fn page_size(mut self, n: u32) -> Self {
        self.page_size = n;
        self
    }

    pub fn resolved_api_key(&self) -> Option<String> {
        self.api_key
            .clone()
            .filter(|k| !k.is_empty())
            .or_else(|| self.api_key_env.as_deref().and_then(|v| std::env::var(v).ok()))
            .filter(|k| !k.is_empty())
    }

    pub fn host(&self) -> String {
        url::Url::parse(&self.base_url)
            .ok()
            .and_then(|u| u.host_str().map(str::to_string))
            .unwrap_or_default()
    }

    pub(crate) fn endpoint(&self, path: &str) -> String {
        format!("{}/{}", self.base_url.trim_end_matches('/'), path.trim_start_matches('/'))
    }
}

/// Records returned by one source call, with pagination bookkeeping.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SourceBatch {
    /// DOI-unique records sorted by DOI.
    pub records: Vec<DatasetRecord>,
    /// Records seen across all pages before de-duplication.
    pub raw_count: usize,
    /// Totals reported by the API, summed over queries.
    pub reported_total: Option<u64>,
    pub warnings: Vec<String>,
}

impl SourceBatch {
    pub(crate) fn finish(mut self) -> Self {
        self.records.sort_by(|a, b| a.doi.cmp(&b.doi));
        self.records.dedup_by(|a, b| a.doi == b.doi);
        self
    }

    pub(crate) fn check_total(&mut self, label: &str, seen: usize, total: Option<u64>) {
        if let Some(t) = total {
            *self.reported_total.get_or_insert(0) += t;
            if t != seen as u64 {
                let msg = format!("{label}: API reported {t} results but pagination yielded {seen}");
                log::warn!("{msg}");
                self.warnings.push(msg);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceType {
    Dataset,
    Software,
}

impl ResourceType {
    pub fn as_str(self) -> &'static str {
        match self {
            ResourceType::Dataset => "dataset",
            ResourceType::Software => "software",
        }
    }
}

impl std::str::FromStr for ResourceType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dataset" => Ok(ResourceType::Dataset),
            "software" => Ok(ResourceType::Software),
            other => Err(format!("unknown resource type {other:?}")),
        }
    }
}

pub(crate) fn resource_type_param(types: &[ResourceType]) -> String {
    let mut v: Vec<&str> = types.iter().map(|t| t.as_str()).collect();
    v.sort();
    v.dedup();
    v.join(",")
}

// JSON access helpers shared by the parsers.

pub(crate) fn jstr<'a>(v: &'a Value, key: &str) -> Option<&'a str> {
    v.get(key).and_then(Value::as_str).filter(|s| !s.is_empty())
}

pub(crate) fn jarr<'a>(v: &'a Value, key: &str) -> &'a [Value] {
    v.get(key).and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[])
}

/// Integer that may be encoded as a JSON number or string.
pub(crate) fn jint(v: &Value, key: &str) -> Option<i64> {
    match v.get(key)? {
        Value::Number(n) => n.as_i64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

/// Strings from an array whose items are strings or objects with `field`.
pub(crate) fn string_list(v: &Value, key: &str, field: &str) -> Vec<String> {
    jarr(v, key)
        .iter()
        .filter_map(|x| match x {
            Value::String(s) => Some(s.clone()),
            Value::Object(_) => jstr(x, field).map(str::to_string),
            _ => None,
        })
        .filter(|s| !s.trim().is_empty())
        .collect()
}
