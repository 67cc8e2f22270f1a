//! Run configuration, loaded from one TOML document.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assess::{LicenseTable, SoftwareExtensions};
use crate::cleaning::CleaningOptions;
use crate::error::ConfigError;
use crate::harvest::{HarvestClients, HarvestPlan};
use crate::mediated::PartnerPublisher;
use crate::model::InstitutionProfile;
use crate::sources::cache::{CacheMode, RawResponseCache};
use crate::sources::crossref::CrossrefClient;
use crate::sources::datacite::{DataciteClient, QueryMode};
use crate::sources::http::HttpClient;
use crate::sources::ncbi::NcbiClient;
use crate::sources::openalex::OpenAlexClient;
use crate::sources::repos::{RepoClient, RepoEndpoint};
use crate::sources::{ResourceType, SourceConfig};

pub const KNOWN_SOURCES: [&str; 4] = ["datacite", "crossref", "openalex", "ncbi"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CacheSettings {
    pub dir: PathBuf,
    pub mode: CacheMode,
}

impl Default for CacheSettings {
    fn default() -> Self {
        CacheSettings { dir: PathBuf::from("cache"), mode: CacheMode::Live }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarvestSettings {
    pub mode: QueryMode,
    pub resource_types: Vec<ResourceType>,
    pub ncbi_term: String,
    pub crossref_excluded_publishers: Vec<String>,
    pub allow_partial: bool,
}

impl Default for HarvestSettings {
    fn default() -> Self {
        let p = HarvestPlan::default();
        HarvestSettings {
            mode: p.mode,
            resource_types: p.resource_types,
            ncbi_term: p.ncbi_term,
            crossref_excluded_publishers: p.crossref_excluded_publishers,
            allow_partial: p.allow_partial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssessmentSettings {
    pub nondescript_words: Vec<String>,
    pub software: SoftwareExtensions,
    pub licenses: LicenseTable,
}

impl Default for AssessmentSettings {
    fn default() -> Self {
        AssessmentSettings {
            nondescript_words: crate::assess::title::default_nondescript(),
            software: SoftwareExtensions::default(),
            licenses: LicenseTable::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub institution: InstitutionProfile,
    /// Keyed by `datacite`, `crossref`, `openalex` or `ncbi`.
    #[serde(default)]
    pub sources: BTreeMap<String, SourceConfig>,
    #[serde(default)]
    pub repositories: Vec<RepoEndpoint>,
    #[serde(default)]
    pub partners: Vec<PartnerPublisher>,
    #[serde(default)]
    pub harvest: HarvestSettings,
    #[serde(default)]
    pub cleaning: CleaningOptions,
    #[serde(default)]
    pub assessment: AssessmentSettings,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub cache: CacheSettings,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a config file; relative output and cache paths resolve
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        if cfg.cache.dir.is_relative() {
            cfg.cache.dir = base.join(&cfg.cache.dir);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.institution.validate()?;
        if let Some(bad) = self.sources.keys().find(|k| !KNOWN_SOURCES.contains(&k.as_str())) {
            return Err(ConfigError::Invalid(format!("unknown source {bad:?}")));
        }
        let any_enabled = self.sources.values().any(|s| s.enabled) || self.repositories.iter().any(|r| r.source.enabled);
        if !any_enabled {
            return Err(ConfigError::Invalid("no source is enabled".into()));
        }
        for (name, s) in self.sources.iter().map(|(k, v)| (k.as_str(), v)).chain(self.repositories.iter().map(|r| (r.name.as_str(), &r.source))) {
            if url::Url::parse(&s.base_url).is_err() {
                return Err(ConfigError::Invalid(format!("{name}: base_url {:?} is not a URL", s.base_url)));
            }
            if s.rate_limit.is_nan() || s.rate_limit <= 0.0 {
                return Err(ConfigError::Invalid(format!("{name}: rate_limit must be positive")));
            }
        }
        Ok(())
    }

    pub fn source(&self, name: &str) -> Option<&SourceConfig> {
        self.sources.get(name).filter(|s| s.enabled)
    }

    /// Restricts the run to the named sources. `repos` selects every
    /// repository endpoint.
    pub fn restrict_sources(&mut self, names: &[String]) -> Result<(), ConfigError> {
        for n in names {
            if !KNOWN_SOURCES.contains(&n.as_str()) && n != "repos" {
                return Err(ConfigError::Invalid(format!("unknown source {n:?}")));
            }
        }
        for (k, s) in self.sources.iter_mut() {
            s.enabled &= names.contains(k);
        }
        if !names.iter().any(|n| n == "repos") {
            for r in &mut self.repositories {
                r.source.enabled = false;
            }
        }
        Ok(())
    }

    pub fn plan(&self) -> HarvestPlan {
        HarvestPlan {
            mode: self.harvest.mode,
            resource_types: self.harvest.resource_types.clone(),
            partners: self.partners.clone(),
            crossref_excluded_publishers: self.harvest.crossref_excluded_publishers.clone(),
            ncbi_term: self.harvest.ncbi_term.clone(),
            allow_partial: self.harvest.allow_partial,
        }
    }

    /// HTTP client honouring the cache settings.
    pub fn http_client(&self) -> HttpClient {
        match self.cache.mode {
            CacheMode::Replay => HttpClient::replay(&self.cache.dir),
            mode => HttpClient::live().with_cache(RawResponseCache::new(&self.cache.dir, mode)),
        }
    }

    pub fn clients(&self, http: &HttpClient) -> Result<HarvestClients, ConfigError> {
        let datacite = self
            .source("datacite")
            .ok_or_else(|| ConfigError::Invalid("the datacite source must be enabled for a harvest".into()))?;
        Ok(HarvestClients {
            datacite: DataciteClient::new(http.clone(), datacite.clone()),
            repos: self
                .repositories
                .iter()
                .filter(|r| r.source.enabled)
                .map(|r| RepoClient::new(http.clone(), r.clone()))
                .collect(),
            openalex: self.source("openalex").map(|c| OpenAlexClient::new(http.clone(), c.clone())),
            crossref: self.source("crossref").map(|c| CrossrefClient::new(http.clone(), c.clone())),
            ncbi: self.source("ncbi").map(|c| NcbiClient::new(http.clone(), c.clone())),
        })
    }
}
