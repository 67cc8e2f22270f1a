//! OpenAlex works search: articles with an author at the institution,
//! restricted to a set of publishers.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::http::{HttpClient, Request, RetryPolicy};
use super::{jarr, jstr, SourceConfig};
use crate::error::SourceError;
use crate::text::normalize_doi;

pub const DEFAULT_BASE_URL: &str = "https://api.openalex.org";

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffiliatedArticle {
    pub article_doi: String,
    /// OpenAlex id of the matching host organization.
    pub publisher: String,
}

pub struct OpenAlexClient {
    http: HttpClient,
    cfg: SourceConfig,
}

/// `https://openalex.org/P4310315706` → `P4310315706`.
fn short_id(id: &str) -> &str {
    id.rsplit('/').next().unwrap_or(id)
}

impl OpenAlexClient {
    pub fn new(http: HttpClient, cfg: SourceConfig) -> Self {
        http.limiter().configure(&cfg.host(), cfg.rate_limit, 1);
        let http = http.with_retry(RetryPolicy { max_retries: cfg.max_retries, ..Default::default() });
        OpenAlexClient { http, cfg }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.http = self.http.with_retry(retry);
        self
    }

    pub fn request(&self, ror_id: &str, publishers: &[&str], cursor: &str) -> Request {
        let filter = format!(
            "authorships.institutions.ror:{},locations.source.host_organization:{}",
            ror_id,
            publishers.join("|")
        );
        let mut r = Request::get(self.cfg.endpoint("works"))
            .query("filter", filter)
            .query("per-page", self.cfg.page_size.to_string())
            .query("cursor", cursor)
            .query("select", "doi,locations");
        if let Some(mail) = self.cfg.resolved_api_key() {
            r = r.query("mailto", mail);
        }
        r
    }

    /// DOIs of affiliated articles published by any of `publisher_ids`,
    /// sorted and unique. An empty publisher list returns nothing.
    pub fn affiliated_articles(&self, ror_id: &str, publisher_ids: &[String]) -> Result<Vec<AffiliatedArticle>, SourceError> {
        if publisher_ids.is_empty() {
            return Ok(vec![]);
        }
        let mut wanted: Vec<&str> = publisher_ids.iter().map(|p| short_id(p)).collect();
        wanted.sort();
        wanted.dedup();
        let mut out = Vec::new();
        let mut cursor = "*".to_string();
        loop {
            let req = self.request(ror_id, &wanted, &cursor);
            let page = self.http.get_json(&req)?;
            let results = jarr(&page, "results");
            if results.is_empty() {
                break;
            }
            for w in results {
                let Some(doi) = jstr(w, "doi").and_then(|d| normalize_doi(d).ok()) else {
                    continue;
                };
                let publisher = jarr(w, "locations")
                    .iter()
                    .filter_map(|l| l.pointer("/source/host_organization").and_then(Value::as_str))
                    .map(short_id)
                    .find(|h| wanted.contains(h))
                    .unwrap_or_default()
                    .to_string();
                out.push(AffiliatedArticle { article_doi: doi, publisher });
            }
            match page.pointer("/meta/next_cursor").and_then(Value::as_str) {
                Some(c) if c != cursor => cursor = c.to_string(),
                _ => break,
            }
        }
        out.sort();
        out.dedup_by(|a, b| a.article_doi == b.article_doi);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::http::{FnTransport, Response};
    use crate::sources::ratelimit::{RateLimiter, VirtualClock};
    use serde_json::json;
    use std::sync::Arc;

    fn client<F>(f: F) -> (OpenAlexClient, Arc<FnTransport<F>>)
    where
        F: Fn(&Request) -> Result<Response, String> + Send + Sync + 'static,
    {
        let t = Arc::new(FnTransport::new(f));
        let http = HttpClient::new(t.clone(), Arc::new(RateLimiter::new(Arc::new(VirtualClock::default()), 10.0)));
        (OpenAlexClient::new(http, SourceConfig::new(DEFAULT_BASE_URL)), t)
    }

    #[test]
    fn empty_publisher_list_makes_no_call() {
        let (c, t) = client(|_r: &Request| Err("unreachable".into()));
        assert!(c.affiliated_articles("https://ror.org/00hj54h04", &[]).unwrap().is_empty());
        assert!(t.requests().is_empty());
    }

    #[test]
    fn collects_dois_across_pages() {
        let (c, t) = client(|r: &Request| {
            let cursor = &r.query.iter().find(|(k, _)| k == "cursor").unwrap().1;
            let body = if cursor == "*" {
                json!({"meta": {"next_cursor": "n1"}, "results": [
                    {"doi": "https://doi.org/10.1080/ABC.1", "locations": [{"source": {"host_organization": "https://openalex.org/P4310320547"}}]},
                    {"doi": null, "locations": []}]})
            } else {
                json!({"meta": {"next_cursor": null}, "results": []})
            };
            Ok(Response { status: 200, body: body.to_string().into_bytes() })
        });
        let out = c
            .affiliated_articles("https://ror.org/00hj54h04", &["https://openalex.org/P4310320547".into()])
            .unwrap();
        assert_eq!(out, vec![AffiliatedArticle { article_doi: "10.1080/abc.1".into(), publisher: "P4310320547".into() }]);
        let f = &t.requests()[0].query[0].1;
        assert_eq!(f, "authorships.institutions.ror:https://ror.org/00hj54h04,locations.source.host_organization:P4310320547");
    }
}
