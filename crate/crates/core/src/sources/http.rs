//! Rate-limited, retrying HTTP client with the record/replay cache in front.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde_json::Value;

use super::cache::{CacheMode, RawResponseCache};
use super::ratelimit::{Clock, RateLimiter, SystemClock};
use crate::error::SourceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Get,
    Head,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Get => "GET",
            Method::Head => "HEAD",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Request {
    pub method: Method,
    /// URL without query string.
    pub url: String,
    pub query: Vec<(String, String)>,
    pub headers: Vec<(String, String)>,
    pub follow_redirects: bool,
}

impl Request {
    pub fn get(url: impl Into<String>) -> Self {
        Request { method: Method::Get, url: url.into(), query: vec![], headers: vec![], follow_redirects: true }
    }

    pub fn head(url: impl Into<String>) -> Self {
        Request { method: Method::Head, url: url.into(), query: vec![], headers: vec![], follow_redirects: false }
    }

    pub fn query(mut self, k: impl Into<String>, v: impl Into<String>) -> Self {
        self.query.push((k.into(), v.into()));
        self
    }

    pub fn header(mut self, k: impl Into<String>, v: impl Into<String>) -> Self {
        self.headers.push((k.into(), v.into()));
        self
    }

    pub fn host(&self) -> String {
        url::Url::parse(&self.url)
            .ok()
            .and_then(|u| u.host_str().map(str::to_string))
            .unwrap_or_default()
    }

    /// Full URL with the query string, for logs and errors.
    pub fn display_url(&self) -> String {
        match url::Url::parse_with_params(&self.url, &self.query) {
            Ok(u) => u.to_string(),
            Err(_) => self.url.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Response {
    pub status: u16,
    pub body: Vec<u8>,
}

impl Response {
    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }
}

/// Something that performs a single HTTP exchange.
pub trait Transport: Send + Sync {
    fn execute(&self, req: &Request) -> Result<Response, String>;
}

/// Network transport backed by `ureq`.
pub struct UreqTransport {
    follow: ureq::Agent,
    no_follow: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let build = |redirects: u32| {
            ureq::Agent::config_builder()
                .http_status_as_error(false)
                .max_redirects(redirects)
                .max_redirects_will_error(false)
                .timeout_global(Some(timeout))
                .user_agent(concat!("datahunt/", env!("CARGO_PKG_VERSION")))
                .build()
                .new_agent()
        };
        UreqTransport { follow: build(10), no_follow: build(0) }
    }
}

impl Default for UreqTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(60))
    }
}

impl Transport for UreqTransport {
    fn execute(&self, req: &Request) -> Result<Response, String> {
        let agent = if req.follow_redirects { &self.follow } else { &self.no_follow };
        let result = match req.method {
            Method::Get => {
                let mut b = agent.get(&req.url).query_pairs(req.query.iter().map(|(k, v)| (k.as_str(), v.as_str())));
                for (k, v) in &req.headers {
                    b = b.header(k.as_str(), v.as_str());
                }
                b.call()
            }
            Method::Head => {
                let mut b = agent.head(&req.url).query_pairs(req.query.iter().map(|(k, v)| (k.as_str(), v.as_str())));
                for (k, v) in &req.headers {
                    b = b.header(k.as_str(), v.as_str());
                }
                b.call()
            }
        };
        let mut resp = result.map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let body = if req.method == Method::Head {
            Vec::new()
        } else {
            resp.body_mut()
                .with_config()
                .limit(512 * 1024 * 1024)
                .read_to_vec()
                .map_err(|e| e.to_string())?
        };
        Ok(Response { status, body })
    }
}

/// Transport that refuses to run; counts the attempts. Used to prove that
/// replayed runs stay offline.
#[derive(Debug, Default)]
pub struct NetworkGuard {
    calls: AtomicU64,
}

impl NetworkGuard {
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Transport for NetworkGuard {
    fn execute(&self, req: &Request) -> Result<Response, String> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        Err(format!("network access attempted: {} {}", req.method.as_str(), req.display_url()))
    }
}

/// Scripted transport answering from a closure; records every request.
pub struct FnTransport<F> {
    f: F,
    pub log: Mutex<Vec<Request>>,
}

impl<F> FnTransport<F>
where
    F: Fn(&Request) -> Result<Response, String> + Send + Sync,
{
    pub fn new(f: F) -> Self {
        FnTransport { f, log: Mutex::new(Vec::new()) }
    }

    pub fn requests(&self) -> Vec<Request> {
        self.log.lock().unwrap().clone()
    }
}

impl<F> Transport for FnTransport<F>
where
    F: Fn(&Request) -> Result<Response, String> + Send + Sync,
{
    fn execute(&self, req: &Request) -> Result<Response, String> {
        self.log.lock().unwrap().push(req.clone());
        (self.f)(req)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_retries: 3, base_delay: Duration::from_secs(1) }
    }
}

fn retryable(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

#[derive(Clone)]
pub struct HttpClient {
    transport: Arc<dyn Transport>,
    cache: Option<RawResponseCache>,
    limiter: Arc<RateLimiter>,
    retry: RetryPolicy,
}

impl std::fmt::Debug for HttpClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpClient")
            .field("cache", &self.cache)
            .field("retry", &self.retry)
            .finish()
    }
}

impl HttpClient {
    pub fn new(transport: Arc<dyn Transport>, limiter: Arc<RateLimiter>) -> Self {
        HttpClient { transport, cache: None, limiter, retry: RetryPolicy::default() }
    }

    /// Live client over the network with a default 5 req/s ceiling per host.
    pub fn live() -> Self {
        Self::new(
            Arc::new(UreqTransport::default()),
            Arc::new(RateLimiter::new(Arc::new(SystemClock::default()), 5.0)),
        )
    }

    /// Offline client that serves only from `dir`.
    pub fn replay(dir: impl Into<std::path::PathBuf>) -> Self {
        Self::new(
            Arc::new(NetworkGuard::default()),
            Arc::new(RateLimiter::new(Arc::new(SystemClock::default()), 5.0)),
        )
        .with_cache(RawResponseCache::new(dir, CacheMode::Replay))
    }

    pub fn with_cache(mut self, cache: RawResponseCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn limiter(&self) -> &Arc<RateLimiter> {
        &self.limiter
    }

    pub fn cache_mode(&self) -> CacheMode {
        self.cache.as_ref().map(|c| c.mode).unwrap_or(CacheMode::Live)
    }

    fn clock(&self) -> &Arc<dyn Clock> {
        self.limiter.clock()
    }

    /// Performs the request. Non-retryable error statuses (400, 404, ...)
    /// are returned as responses; 429/5xx and transport failures are retried
    /// with exponential backoff and become errors once retries run out.
    pub fn send(&self, req: &Request) -> Result<Response, SourceError> {
        let method = req.method.as_str();
        if let Some(cache) = self.cache.as_ref().filter(|c| c.mode == CacheMode::Replay) {
            let (status, body) = cache.load(method, &req.url, &req.query)?;
            return Ok(Response { status, body });
        }
        let host = req.host();
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            self.limiter.acquire(&host);
            let outcome = self.transport.execute(req);
            let again = attempt <= self.retry.max_retries;
            match outcome {
                Ok(resp) if retryable(resp.status) => {
                    if !again {
                        return Err(SourceError::Http { url: req.display_url(), status: resp.status, attempts: attempt });
                    }
                    log::warn!("HTTP {} from {}; retrying", resp.status, req.display_url());
                }
                Ok(resp) => {
                    if let Some(cache) = self.cache.as_ref().filter(|c| c.mode == CacheMode::Record) {
                        cache.store(method, &req.url, &req.query, resp.status, &resp.body)?;
                    }
                    return Ok(resp);
                }
                Err(message) => {
                    if !again {
                        return Err(SourceError::Transport { url: req.display_url(), message });
                    }
                    log::warn!("transport error for {}: {message}; retrying", req.display_url());
                }
            }
            let backoff = self.retry.base_delay.saturating_mul(1u32 << (attempt - 1).min(16));
            self.clock().sleep(backoff);
        }
    }

    /// GET that must succeed with JSON.
    pub fn get_json(&self, req: &Request) -> Result<Value, SourceError> {
        let resp = self.send(req)?;
        expect_success(req, &resp)?;
        parse_json(req, &resp.body)
    }
}

pub fn expect_success(req: &Request, resp: &Response) -> Result<(), SourceError> {
    if resp.is_success() {
        Ok(())
    } else {
        Err(SourceError::Http { url: req.display_url(), status: resp.status, attempts: 1 })
    }
}

pub fn parse_json(req: &Request, body: &[u8]) -> Result<Value, SourceError> {
    serde_json::from_slice(body).map_err(|e| SourceError::Json { url: req.display_url(), message: e.to_string() })
}
