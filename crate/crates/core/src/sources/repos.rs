//! Repository search APIs used to cross-check the DataCite results: Dryad,
//! Dataverse installations and Zenodo.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::http::{HttpClient, Request, Response, RetryPolicy};
use super::{jarr, jstr, SourceBatch, SourceConfig};
use crate::error::SourceError;
use crate::model::{Agent, DatasetRecord, InstitutionProfile, NameType, SourceTag};
use crate::text::normalize_doi;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepoKind {
    Dryad,
    Dataverse,
    Zenodo,
}

/// A repository endpoint. `name` is the standardized repository label used
/// to select that repository's DataCite records for the comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepoEndpoint {
    pub kind: RepoKind,
    pub name: String,
    #[serde(flatten)]
    pub source: SourceConfig,
}

pub struct RepoClient {
    http: HttpClient,
    endpoint: RepoEndpoint,
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', ""))
}

impl RepoClient {
    pub fn new(http: HttpClient, endpoint: RepoEndpoint) -> Self {
        http.limiter().configure(&endpoint.source.host(), endpoint.source.rate_limit, 1);
        let http = http.with_retry(RetryPolicy { max_retries: endpoint.source.max_retries, ..Default::default() });
        RepoClient { http, endpoint }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.http = self.http.with_retry(retry);
        self
    }

    pub fn endpoint(&self) -> &RepoEndpoint {
        &self.endpoint
    }

    fn api_key(&self) -> Result<Option<String>, SourceError> {
        let key = self.endpoint.source.resolved_api_key();
        if key.is_none() && self.endpoint.source.api_key_required {
            return Err(SourceError::AuthRequired { source_name: self.endpoint.name.clone() });
        }
        Ok(key)
    }

    fn search_term(&self, profile: &InstitutionProfile) -> String {
        if let Some(t) = &self.endpoint.source.term {
            return t.clone();
        }
        let terms: Vec<String> = profile.matching_terms().map(quote).collect();
        match self.endpoint.kind {
            RepoKind::Dryad => profile.ror_id.clone(),
            RepoKind::Dataverse => terms
                .iter()
                .map(|t| format!("authorAffiliation:{t}"))
                .collect::<Vec<_>>()
                .join(" OR "),
            RepoKind::Zenodo => format!("creators.affiliation:({})", terms.join(" OR ")),
        }
    }

    pub fn page_request(&self, term: &str, page: u32, key: Option<&str>) -> Request {
        let cfg = &self.endpoint.source;
        let size = cfg.page_size.to_string();
        let mut r = match self.endpoint.kind {
            RepoKind::Dryad => Request::get(cfg.endpoint("api/v2/search"))
                .query("affiliation", term)
                .query("per_page", size)
                .query("page", page.to_string()),
            RepoKind::Dataverse => Request::get(cfg.endpoint("api/search"))
                .query("q", term)
                .query("type", "dataset")
                .query("per_page", size)
                .query("start", ((page - 1) * cfg.page_size).to_string()),
            RepoKind::Zenodo => Request::get(cfg.endpoint("api/records"))
                .query("q", term)
                .query("type", "dataset")
                .query("size", size)
                .query("page", page.to_string()),
        };
        if let Some(k) = key {
            r = match self.endpoint.kind {
                RepoKind::Dataverse => r.header("X-Dataverse-key", k),
                _ => r.header("Authorization", format!("Bearer {k}")),
            };
        }
        r
    }

    fn check_auth(&self, resp: &Response) -> Result<(), SourceError> {
        if resp.status == 401 || resp.status == 403 {
            Err(SourceError::AuthRequired { source_name: self.endpoint.name.clone() })
        } else {
            Ok(())
        }
    }

    /// Affiliated records as the repository's own search reports them. An
    /// endpoint disabled in config yields an empty batch.
    pub fn query(&self, profile: &InstitutionProfile) -> Result<SourceBatch, SourceError> {
        let mut batch = SourceBatch::default();
        if !self.endpoint.source.enabled {
            return Ok(batch);
        }
        let key = self.api_key()?;
        let term = self.search_term(profile);
        let mut seen = 0usize;
        let mut total: Option<u64> = None;
        for page in 1u32.. {
            let req = self.page_request(&term, page, key.as_deref());
            let resp = self.http.send(&req)?;
            self.check_auth(&resp)?;
            super::http::expect_success(&req, &resp)?;
            let body = super::http::parse_json(&req, &resp.body)?;
            let (items, page_total) = self.items(&body);
            if total.is_none() {
                total = page_total;
            }
            if items.is_empty() {
                break;
            }
            seen += items.len();
            for item in items {
                match self.parse(item) {
                    Ok(r) => batch.records.push(r),
                    Err(e) => batch.warnings.push(format!("skipped {} item: {e}", self.endpoint.name)),
                }
            }
            if total.is_some_and(|t| seen as u64 >= t) || (items.len() as u32) < self.endpoint.source.page_size {
                break;
            }
        }
        batch.raw_count = seen;
        batch.check_total(&format!("{} search", self.endpoint.name), seen, total);
        Ok(batch.finish())
    }

    fn items<'a>(&self, body: &'a Value) -> (&'a [Value], Option<u64>) {
        match self.endpoint.kind {
            RepoKind::Dryad => (
                body.pointer("/_embedded/stash:datasets")
                    .and_then(Value::as_array)
                    .map(Vec::as_slice)
                    .unwrap_or(&[]),
                body.get("total").and_then(Value::as_u64),
            ),
            RepoKind::Dataverse => (
                body.pointer("/data/items").and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]),
                body.pointer("/data/total_count").and_then(Value::as_u64),
            ),
            RepoKind::Zenodo => (
                body.pointer("/hits/hits").and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[]),
                body.pointer("/hits/total")
                    .and_then(|t| t.as_u64().or_else(|| t.get("value").and_then(Value::as_u64))),
            ),
        }
    }

    fn parse(&self, item: &Value) -> Result<DatasetRecord, String> {
        let raw = match self.endpoint.kind {
            RepoKind::Dryad => jstr(item, "identifier"),
            RepoKind::Dataverse => jstr(item, "global_id"),
            RepoKind::Zenodo => jstr(item, "doi").or_else(|| item.pointer("/pids/doi/identifier").and_then(Value::as_str)),
        }
        .ok_or("missing identifier")?;
        let doi = normalize_doi(raw).map_err(|e| e.to_string())?;
        let mut r = DatasetRecord::new(doi, SourceTag::RepoCrossValidation);
        r.repository = self.endpoint.name.clone();
        r.publisher_raw = self.endpoint.name.clone();
        match self.endpoint.kind {
            RepoKind::Dryad => {
                r.title = jstr(item, "title").unwrap_or_default().to_string();
                r.available = jstr(item, "publicationDate").map(str::to_string);
                r.creators = jarr(item, "authors")
                    .iter()
                    .map(|a| Agent {
                        name: match (jstr(a, "lastName"), jstr(a, "firstName")) {
                            (Some(l), Some(f)) => format!("{l}, {f}"),
                            (Some(l), None) => l.to_string(),
                            _ => String::new(),
                        },
                        name_type: NameType::Personal,
                        affiliations: jstr(a, "affiliation").map(|s| vec![s.to_string()]).unwrap_or_default(),
                        affiliation_identifiers: jstr(a, "affiliationROR").map(|s| vec![s.to_string()]).unwrap_or_default(),
                        orcid: jstr(a, "orcid").and_then(Agent::parse_orcid),
                    })
                    .collect();
            }
            RepoKind::Dataverse => {
                r.title = jstr(item, "name").unwrap_or_default().to_string();
                r.available = jstr(item, "published_at").map(|s| s.chars().take(10).collect());
                r.creators = super::string_list(item, "authors", "name")
                    .into_iter()
                    .map(|n| Agent { name: n, ..Default::default() })
                    .collect();
            }
            RepoKind::Zenodo => {
                let md = item.get("metadata").cloned().unwrap_or(Value::Null);
                r.title = jstr(&md, "title").unwrap_or_default().to_string();
                r.available = jstr(&md, "publication_date").map(str::to_string);
                r.creators = jarr(&md, "creators")
                    .iter()
                    .map(|c| Agent {
                        name: jstr(c, "name").unwrap_or_default().to_string(),
                        affiliations: jstr(c, "affiliation").map(|s| vec![s.to_string()]).unwrap_or_default(),
                        ..Default::default()
                    })
                    .collect();
            }
        }
        r.publication_year = r.available.as_deref().and_then(crate::model::year_of);
        Ok(r)
    }
}
