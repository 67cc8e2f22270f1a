//! On-disk record/replay cache of raw HTTP responses.
//!
//! Each response is stored as `<key>.body` (verbatim bytes) next to
//! `<key>.meta.json` (request line and status). The key is the SHA-256 of
//! the method, URL and sorted query parameters; request headers (which carry
//! API keys) are not part of it.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::SourceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CacheMode {
    /// Fetch live and store every response.
    Record,
    /// Serve from disk only; a miss is an error and nothing touches the network.
    Replay,
    /// Fetch live without storing.
    #[default]
    Live,
}

impl FromStr for CacheMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "record" => Ok(CacheMode::Record),
            "replay" => Ok(CacheMode::Replay),
            "live" => Ok(CacheMode::Live),
            other => Err(format!("unknown cache mode {other:?}")),
        }
    }
}

pub fn cache_key(method: &str, url: &str, query: &[(String, String)]) -> String {
    let mut pairs: Vec<&(String, String)> = query.iter().collect();
    pairs.sort();
    let mut h = Sha256::new();
    h.update(method.to_ascii_uppercase().as_bytes());
    h.update(b"\n");
    h.update(url.as_bytes());
    for (k, v) in pairs {
        h.update(b"\n");
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedMeta {
    pub method: String,
    pub url: String,
    pub query: Vec<(String, String)>,
    pub status: u16,
}

#[derive(Debug, Clone)]
pub struct RawResponseCache {
    pub cache_dir: PathBuf,
    pub mode: CacheMode,
}

impl RawResponseCache {
    pub fn new(cache_dir: impl Into<PathBuf>, mode: CacheMode) -> Self {
        RawResponseCache { cache_dir: cache_dir.into(), mode }
    }

    fn paths(&self, key: &str) -> (PathBuf, PathBuf) {
        (
            self.cache_dir.join(format!("{key}.body")),
            self.cache_dir.join(format!("{key}.meta.json")),
        )
    }

    pub fn load(&self, method: &str, url: &str, query: &[(String, String)]) -> Result<(u16, Vec<u8>), SourceError> {
        let key = cache_key(method, url, query);
        let (body_path, meta_path) = self.paths(&key);
        if !meta_path.exists() {
            return Err(SourceError::CacheMiss { method: method.to_string(), url: url.to_string(), key });
        }
        let meta_raw = read(&meta_path)?;
        let meta: CachedMeta = serde_json::from_slice(&meta_raw).map_err(|e| SourceError::CacheIo {
            path: meta_path.clone(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        })?;
        let body = if body_path.exists() { read(&body_path)? } else { Vec::new() };
        Ok((meta.status, body))
    }

    pub fn store(
        &self,
        method: &str,
        url: &str,
        query: &[(String, String)],
        status: u16,
        body: &[u8],
    ) -> Result<(), SourceError> {
        fs::create_dir_all(&self.cache_dir).map_err(|e| io_err(&self.cache_dir, e))?;
        let key = cache_key(method, url, query);
        let (body_path, meta_path) = self.paths(&key);
        let mut sorted = query.to_vec();
        sorted.sort();
        let meta = CachedMeta { method: method.to_ascii_uppercase(), url: url.to_string(), query: sorted, status };
        let meta_json = serde_json::to_vec_pretty(&meta).expect("meta serializes");
        fs::write(&body_path, body).map_err(|e| io_err(&body_path, e))?;
        fs::write(&meta_path, meta_json).map_err(|e| io_err(&meta_path, e))?;
        Ok(())
    }
}

fn read(path: &Path) -> Result<Vec<u8>, SourceError> {
    fs::read(path).map_err(|e| io_err(path, e))
}

fn io_err(path: &Path, source: std::io::Error) -> SourceError {
    SourceError::CacheIo { path: path.to_path_buf(), source }
}
