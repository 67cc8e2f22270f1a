//! NCBI E-utilities: BioProject search (`esearch`) and record retrieval
//! (`efetch`, XML).
//!
//! BioProjects have no DOI; records are keyed `ncbi:<accession>`.

use quick_xml::escape::resolve_predefined_entity;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::http::{expect_success, HttpClient, Request, RetryPolicy};
use super::{SourceBatch, SourceConfig};
use crate::error::SourceError;
use crate::model::{Agent, DatasetRecord, NameType, SourceTag, NCBI_SCHEME};

pub const DEFAULT_BASE_URL: &str = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils";
const FETCH_BATCH: usize = 200;

/// Element events with entity references folded into text.
enum Node {
    Open(String, Vec<(String, String)>),
    Close,
    Text(String),
}

fn xml_err(offset: u64, message: impl Into<String>) -> SourceError {
    SourceError::XmlParse { offset, message: message.into() }
}

fn open_node(s: &BytesStart<'_>, offset: u64) -> Result<Node, SourceError> {
    let mut attrs = Vec::new();
    for a in s.attributes() {
        let a = a.map_err(|e| xml_err(offset, e.to_string()))?;
        let v = a.normalized_value(quick_xml::XmlVersion::Implicit1_0).map_err(|e| xml_err(offset, e.to_string()))?;
        attrs.push((a.key.as_ref().to_string(), v.into_owned()));
    }
    Ok(Node::Open(s.name().as_ref().to_string(), attrs))
}

/// Streams `Node`s out of an XML document.
fn walk(xml: &str, mut visit: impl FnMut(Node)) -> Result<(), SourceError> {
    let mut reader = Reader::from_str(xml);
    let mut depth = 0usize;
    loop {
        let ev = reader
            .read_event()
            .map_err(|e| xml_err(reader.error_position(), e.to_string()))?;
        let pos = reader.buffer_position();
        match ev {
            Event::Start(s) => {
                depth += 1;
                visit(open_node(&s, pos)?);
            }
            Event::Empty(s) => {
                visit(open_node(&s, pos)?);
                visit(Node::Close);
            }
            Event::End(_) => {
                depth = depth.saturating_sub(1);
                visit(Node::Close);
            }
            Event::Text(t) => visit(Node::Text(t.xml10_content().into_owned())),
            Event::CData(t) => visit(Node::Text(t.xml10_content().into_owned())),
            Event::GeneralRef(r) => {
                let text = if r.is_char_ref() {
                    r.resolve_char_ref()
                        .map_err(|e| xml_err(pos, e.to_string()))?
                        .map(String::from)
                        .unwrap_or_default()
                } else {
                    let name = r.xml10_content();
                    resolve_predefined_entity(&name)
                        .map(str::to_string)
                        .ok_or_else(|| xml_err(pos, format!("unknown entity &{name};")))?
                };
                visit(Node::Text(text));
            }
            Event::Eof if depth > 0 => return Err(xml_err(pos, "unexpected end of document")),
            Event::Eof => return Ok(()),
            _ => {}
        }
    }
}

/// Tracks the open-element path and the text of the innermost element.
#[derive(Default)]
struct PathState {
    path: Vec<String>,
    text: String,
}

impl PathState {
    fn ends_with(&self, tail: &[&str]) -> bool {
        self.path.len() >= tail.len() && self.path[self.path.len() - tail.len()..].iter().zip(tail).all(|(a, b)| a == b)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchResult {
    pub count: u64,
    pub ids: Vec<String>,
}

pub fn parse_esearch(xml: &str) -> Result<SearchResult, SourceError> {
    let mut st = PathState::default();
    let mut out = SearchResult::default();
    let mut error = None;
    walk(xml, |n| match n {
        Node::Open(name, _) => {
            st.path.push(name);
            st.text.clear();
        }
        Node::Text(t) => st.text.push_str(&t),
        Node::Close => {
            let text = st.text.trim().to_string();
            if st.ends_with(&["eSearchResult", "Count"]) {
                out.count = text.parse().unwrap_or(0);
            } else if st.ends_with(&["IdList", "Id"]) {
                out.ids.push(text);
            } else if st.ends_with(&["eSearchResult", "ERROR"]) && error.is_none() {
                error = Some(text);
            }
            st.path.pop();
            st.text.clear();
        }
    })?;
    if let Some(e) = error {
        return Err(SourceError::InvalidRequest(format!("esearch: {e}")));
    }
    Ok(out)
}

/// Parses an efetch BioProject document into records.
pub fn parse_bioprojects(xml: &str) -> Result<Vec<DatasetRecord>, SourceError> {
    let mut st = PathState::default();
    let mut out = Vec::new();
    let mut cur: Option<DatasetRecord> = None;
    walk(xml, |n| match n {
        Node::Open(name, attrs) => {
            let attr = |k: &str| attrs.iter().find(|(a, _)| a == k).map(|(_, v)| v.clone());
            match name.as_str() {
                "DocumentSummary" => {
                    let mut r = DatasetRecord::new(String::new(), SourceTag::Ncbi);
                    r.repository = "NCBI".into();
                    r.publisher_raw = "NCBI".into();
                    r.resource_type_general = "Dataset".into();
                    cur = Some(r);
                }
                "ArchiveID" => {
                    if let (Some(r), Some(acc)) = (cur.as_mut(), attr("accession")) {
                        if r.doi.is_empty() {
                            r.doi = format!("{NCBI_SCHEME}{acc}");
                        }
                    }
                }
                "Submission" => {
                    if let (Some(r), Some(d)) = (cur.as_mut(), attr("submitted")) {
                        r.registered = Some(d);
                    }
                }
                _ => {}
            }
            st.path.push(name);
            st.text.clear();
        }
        Node::Text(t) => st.text.push_str(&t),
        Node::Close => {
            let text = st.text.trim().to_string();
            if let Some(r) = cur.as_mut() {
                if st.ends_with(&["ProjectDescr", "Title"]) {
                    r.title = text;
                } else if st.ends_with(&["ProjectDescr", "ProjectReleaseDate"]) {
                    r.available = Some(text.chars().take(10).collect());
                    r.publication_year = crate::model::year_of(&text);
                } else if st.ends_with(&["Organization", "Name"]) && !text.is_empty() {
                    r.contributors.push(Agent { name: text, name_type: NameType::Organizational, ..Default::default() });
                }
            }
            if st.path.last().map(String::as_str) == Some("DocumentSummary") {
                if let Some(r) = cur.take().filter(|r| !r.doi.is_empty()) {
                    out.push(r);
                }
            }
            st.path.pop();
            st.text.clear();
        }
    })?;
    Ok(out)
}

pub struct NcbiClient {
    http: HttpClient,
    cfg: SourceConfig,
}

impl NcbiClient {
    pub fn new(http: HttpClient, cfg: SourceConfig) -> Self {
        http.limiter().configure(&cfg.host(), cfg.rate_limit, 1);
        let http = http.with_retry(RetryPolicy { max_retries: cfg.max_retries, ..Default::default() });
        NcbiClient { http, cfg }
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.http = self.http.with_retry(retry);
        self
    }

    fn with_key(&self, r: Request) -> Request {
        match self.cfg.resolved_api_key() {
            Some(k) => r.query("api_key", k),
            None => r,
        }
    }

    pub fn esearch_request(&self, term: &str, start: u64) -> Request {
        self.with_key(
            Request::get(self.cfg.endpoint("esearch.fcgi"))
                .query("db", "bioproject")
                .query("term", term)
                .query("retstart", start.to_string())
                .query("retmax", self.cfg.page_size.to_string()),
        )
    }

    pub fn efetch_request(&self, ids: &[String]) -> Request {
        self.with_key(
            Request::get(self.cfg.endpoint("efetch.fcgi"))
                .query("db", "bioproject")
                .query("id", ids.join(","))
                .query("retmode", "xml"),
        )
    }

    fn text(&self, req: &Request) -> Result<String, SourceError> {
        let resp = self.http.send(req)?;
        expect_success(req, &resp)?;
        String::from_utf8(resp.body).map_err(|e| xml_err(e.utf8_error().valid_up_to() as u64, "invalid UTF-8"))
    }

    /// All BioProjects matching `term`.
    pub fn bioprojects(&self, term: &str) -> Result<SourceBatch, SourceError> {
        if term.trim().is_empty() {
            return Err(SourceError::InvalidRequest("empty NCBI search term".into()));
        }
        let mut ids = Vec::new();
        let mut count = None;
        loop {
            let page = parse_esearch(&self.text(&self.esearch_request(term, ids.len() as u64))?)?;
            count.get_or_insert(page.count);
            if page.ids.is_empty() {
                break;
            }
            ids.extend(page.ids);
            if ids.len() as u64 >= page.count {
                break;
            }
        }
        let mut batch = SourceBatch::default();
        batch.check_total(&format!("NCBI esearch {term:?}"), ids.len(), count);
        for chunk in ids.chunks(FETCH_BATCH) {
            batch.records.extend(parse_bioprojects(&self.text(&self.efetch_request(chunk))?)?);
        }
        batch.raw_count = batch.records.len();
        Ok(batch.finish())
    }
}
