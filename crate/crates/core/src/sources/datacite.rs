//! DataCite REST API (`/dois`, JSON:API) adapter.

use serde_json::Value;

use super::http::{HttpClient, Request};
use super::{jarr, jint, jstr, resource_type_param, string_list, ResourceType, SourceBatch, SourceConfig};
use crate::error::SourceError;
use crate::matching::InstitutionMatcher;
use crate::model::{Agent, DatasetRecord, InstitutionProfile, NameType, Registry, RelatedIdentifier, SourceTag};
use crate::text::normalize_doi;

pub const DEFAULT_BASE_URL: &str = "https://api.datacite.org";

/// How the institution is expressed in the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryMode {
    /// Creator affiliation identifier equals the ROR URL.
    Ror,
    /// Creator affiliation name equals the official name.
    Single,
    /// Every permutation in each of the four agent fields.
    Full,
}

impl std::str::FromStr for QueryMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ror" => Ok(QueryMode::Ror),
            "single" => Ok(QueryMode::Single),
            "full" => Ok(QueryMode::Full),
            other => Err(format!("unknown query mode {other:?}")),
        }
    }
}

pub const AGENT_FIELDS: [&str; 4] = [
    "creators.affiliation.name",
    "contributors.affiliation.name",
    "creators.name",
    "contributors.name",
];

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Search clauses for one mode; Full-mode clauses are OR-ed in chunks.
pub fn build_clauses(profile: &InstitutionProfile, mode: QueryMode) -> Vec<String> {
    match mode {
        QueryMode::Ror => vec![format!("creators.affiliation.affiliationIdentifier:{}", quote(&profile.ror_id))],
        QueryMode::Single => vec![format!("creators.affiliation.name:{}", quote(&profile.official_name))],
        QueryMode::Full => {
            let terms = profile.query_strings();
            AGENT_FIELDS
                .iter()
                .flat_map(|f| terms.iter().map(move |t| format!("{f}:{}", quote(t))))
                .collect()
        }
    }
}

pub struct DataciteClient {
    http: HttpClient,
    cfg: SourceConfig,
}

impl DataciteClient {
    pub fn new(http: HttpClient, cfg: SourceConfig) -> Self {
        http.limiter().configure(&cfg.host(), cfg.rate_limit, 1);
        let http = http.with_retry(super::http::RetryPolicy { max_retries: cfg.max_retries, ..Default::default() });
        DataciteClient { http, cfg }
    }

    /// Same client with a caller-chosen retry policy (tests use zero delays).
    pub fn with_retry(mut self, retry: super::http::RetryPolicy) -> Self {
        self.http = self.http.with_retry(retry);
        self
    }

    pub fn config(&self) -> &SourceConfig {
        &self.cfg
    }

    pub fn search_request(&self, query: &str, types: &[ResourceType], cursor: &str) -> Request {
        let mut r = Request::get(self.cfg.endpoint("dois"))
            .query("query", query)
            .query("page[size]", self.cfg.page_size.to_string())
            .query("page[cursor]", cursor)
            .query("affiliation", "true")
            .query("publisher", "true");
        if !types.is_empty() {
            r = r.query("resource-type-id", resource_type_param(types));
        }
        r
    }

    /// Runs one search to exhaustion, following the cursor links.
    fn paginate(&self, query: &str, types: &[ResourceType], batch: &mut SourceBatch) -> Result<(), SourceError> {
        let mut cursor = "1".to_string();
        let mut seen = 0usize;
        let mut total = None;
        loop {
            let req = self.search_request(query, types, &cursor);
            let page = self.http.get_json(&req)?;
            if total.is_none() {
                total = page.pointer("/meta/total").and_then(Value::as_u64);
            }
            let items = jarr(&page, "data");
            seen += items.len();
            for item in items {
                match parse_item(item) {
                    Ok(r) => batch.records.push(r),
                    Err(e) => batch.warnings.push(format!("skipped DataCite item: {e}")),
                }
            }
            let next = page
                .pointer("/links/next")
                .and_then(Value::as_str)
                .and_then(next_cursor);
            match next {
                Some(c) if !items.is_empty() && c != cursor => cursor = c,
                _ => break,
            }
        }
        batch.raw_count += seen;
        batch.check_total(&format!("DataCite query {query:?}"), seen, total);
        Ok(())
    }

    /// OR-s the clauses in chunks; a chunk rejected as too large (400/414)
    /// is halved until it goes through.
    fn run_chunk(&self, clauses: &[String], types: &[ResourceType], batch: &mut SourceBatch) -> Result<(), SourceError> {
        let query = clauses.join(" OR ");
        match self.paginate(&query, types, batch) {
            Err(SourceError::Http { status: 400 | 414, .. }) if clauses.len() > 1 => {
                log::info!("DataCite rejected {} clauses; halving", clauses.len());
                let mid = clauses.len() / 2;
                self.run_chunk(&clauses[..mid], types, batch)?;
                self.run_chunk(&clauses[mid..], types, batch)
            }
            Err(SourceError::Http { status: 400 | 414, .. }) => Err(SourceError::QueryTooLarge(query)),
            other => other,
        }
    }

    /// Institution search; records are tagged with the general-query source
    /// and annotated with the matching evidence.
    pub fn query(
        &self,
        profile: &InstitutionProfile,
        types: &[ResourceType],
        mode: QueryMode,
    ) -> Result<SourceBatch, SourceError> {
        let clauses = build_clauses(profile, mode);
        if clauses.is_empty() {
            return Err(SourceError::InvalidRequest("profile has no query strings".into()));
        }
        let mut batch = SourceBatch::default();
        for chunk in clauses.chunks(self.cfg.clause_chunk.max(1)) {
            self.run_chunk(chunk, types, &mut batch)?;
        }
        let matcher = InstitutionMatcher::new(profile);
        let mut batch = batch.finish();
        for r in &mut batch.records {
            r.source = SourceTag::DataciteGeneral;
            r.r#match = matcher.match_record(r);
        }
        Ok(batch)
    }

    /// All records whose publisher field is `publisher`.
    pub fn query_publisher(&self, publisher: &str, types: &[ResourceType]) -> Result<SourceBatch, SourceError> {
        let mut batch = SourceBatch::default();
        self.paginate(&format!("publisher:{}", quote(publisher)), types, &mut batch)?;
        Ok(batch.finish())
    }

    pub fn fetch_request(&self, doi: &str) -> Request {
        Request::get(self.cfg.endpoint(&format!("dois/{doi}")))
            .query("affiliation", "true")
            .query("publisher", "true")
    }

    /// Single-record lookup.
    pub fn fetch_doi(&self, doi: &str) -> Result<DatasetRecord, SourceError> {
        let doi = normalize_doi(doi)?;
        let req = self.fetch_request(&doi);
        let resp = self.http.send(&req)?;
        if resp.status == 404 {
            return Err(SourceError::NotFound(doi));
        }
        super::http::expect_success(&req, &resp)?;
        let body = super::http::parse_json(&req, &resp.body)?;
        let data = body.get("data").ok_or_else(|| SourceError::Json {
            url: req.display_url(),
            message: "missing data".into(),
        })?;
        parse_item(data).map_err(|message| SourceError::Json { url: req.display_url(), message })
    }
}

fn next_cursor(link: &str) -> Option<String> {
    let u = url::Url::parse(link).ok()?;
    u.query_pairs().find(|(k, _)| k == "page[cursor]").map(|(_, v)| v.into_owned())
}

fn parse_agent(v: &Value) -> Agent {
    let name = jstr(v, "name")
        .map(str::to_string)
        .or_else(|| match (jstr(v, "familyName"), jstr(v, "givenName")) {
            (Some(f), Some(g)) => Some(format!("{f}, {g}")),
            (Some(f), None) => Some(f.to_string()),
            _ => None,
        })
        .unwrap_or_default();
    let name_type = match jstr(v, "nameType") {
        Some("Personal") => NameType::Personal,
        Some("Organizational") => NameType::Organizational,
        _ => NameType::Unknown,
    };
    let affiliation_identifiers = jarr(v, "affiliation")
        .iter()
        .filter_map(|a| jstr(a, "affiliationIdentifier"))
        .map(str::to_string)
        .collect();
    let orcid = jarr(v, "nameIdentifiers")
        .iter()
        .filter(|n| jstr(n, "nameIdentifierScheme").is_some_and(|s| s.eq_ignore_ascii_case("orcid")))
        .filter_map(|n| jstr(n, "nameIdentifier"))
        .find_map(Agent::parse_orcid);
    Agent {
        name,
        name_type,
        affiliations: string_list(v, "affiliation", "name"),
        affiliation_identifiers,
        orcid,
    }
}

/// Parses one `data` item of the DataCite JSON:API response.
pub fn parse_item(item: &Value) -> Result<DatasetRecord, String> {
    let attrs = item.get("attributes").ok_or("missing attributes")?;
    let raw_doi = jstr(attrs, "doi").or_else(|| jstr(item, "id")).ok_or("missing doi")?;
    let doi = normalize_doi(raw_doi).map_err(|e| e.to_string())?;
    let mut r = DatasetRecord::new(doi, SourceTag::DataciteGeneral);
    r.registry = Registry::DataCite;
    r.publisher_raw = match attrs.get("publisher") {
        Some(Value::String(s)) => s.clone(),
        Some(p @ Value::Object(_)) => jstr(p, "name").unwrap_or_default().to_string(),
        _ => String::new(),
    };
    r.repository = r.publisher_raw.clone();
    r.title = jarr(attrs, "titles")
        .iter()
        .find_map(|t| jstr(t, "title"))
        .unwrap_or_default()
        .to_string();
    r.creators = jarr(attrs, "creators").iter().map(parse_agent).collect();
    r.contributors = jarr(attrs, "contributors").iter().map(parse_agent).collect();
    r.publication_year = jint(attrs, "publicationYear").and_then(|y| i32::try_from(y).ok());
    r.registered = jstr(attrs, "registered").map(str::to_string);
    r.updated = jstr(attrs, "updated").map(str::to_string);
    r.available = jarr(attrs, "dates")
        .iter()
        .find(|d| jstr(d, "dateType") == Some("Available"))
        .and_then(|d| jstr(d, "date"))
        .map(str::to_string);
    r.resource_type_general = attrs
        .pointer("/types/resourceTypeGeneral")
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    r.related_identifiers = jarr(attrs, "relatedIdentifiers")
        .iter()
        .filter_map(|x| {
            let rel = jstr(x, "relationType")?;
            let id = jstr(x, "relatedIdentifier")?;
            Some(RelatedIdentifier::new(rel, id, jstr(x, "relatedIdentifierType").unwrap_or_default()))
        })
        .collect();
    r.rights_identifiers = jarr(attrs, "rightsList")
        .iter()
        .filter_map(|x| {
            jstr(x, "rightsIdentifier")
                .or_else(|| jstr(x, "rightsUri"))
                .or_else(|| jstr(x, "rights"))
        })
        .map(str::to_string)
        .collect();
    r.formats = string_list(attrs, "formats", "format");
    r.sizes = string_list(attrs, "sizes", "size");
    r.container_identifier = attrs
        .pointer("/container/identifier")
        .and_then(Value::as_str)
        .filter(|s| !s.is_empty())
        .map(str::to_string);
    Ok(r)
}
