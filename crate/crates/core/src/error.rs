use std::path::PathBuf;

use thiserror::Error;

/// A string that does not parse as a DOI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed DOI: {0:?}")]
pub struct MalformedDoi(pub String);

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("institution profile has no permutations")]
    NoPermutations,
    #[error("official name {0:?} is not among the permutations")]
    OfficialNameMissing(String),
    #[error("permutations {0:?} and {1:?} are identical after normalization")]
    DuplicatePermutation(String, String),
    #[error("ROR identifier {0:?} is not of the form https://ror.org/<9 chars>")]
    InvalidRor(String),
}

/// Errors raised by the HTTP-backed source adapters.
#[derive(Debug, Error)]
pub enum SourceError {
    #[error("HTTP {status} from {url} after {attempts} attempt(s)")]
    Http { url: String, status: u16, attempts: u32 },
    #[error("transport failure for {url}: {message}")]
    Transport { url: String, message: String },
    #[error("{0} not found")]
    NotFound(String),
    #[error("query too large: {0}")]
    QueryTooLarge(String),
    #[error("{source_name} requires an API key")]
    AuthRequired { source_name: String },
    #[error("XML parse error at byte {offset}: {message}")]
    XmlParse { offset: u64, message: String },
    #[error("unexpected JSON from {url}: {message}")]
    Json { url: String, message: String },
    #[error("no cached response for {method} {url} (key {key})")]
    CacheMiss { method: String, url: String, key: String },
    #[error("cache I/O on {path}: {source}")]
    CacheIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    MalformedDoi(#[from] MalformedDoi),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

/// A tabular or JSON input that does not have the expected shape.
#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("{file}: missing required column {column:?}")]
    MissingColumn { file: String, column: String },
    #[error("{file}, line {line}: {message}")]
    BadRow { file: String, line: u64, message: String },
    #[error("{file}: {source}")]
    Csv {
        file: String,
        #[source]
        source: csv::Error,
    },
    #[error("{file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("invalid config: {0}")]
    Invalid(String),
}
