//! Discovery, deduplication and assessment of research-data deposits
//! affiliated with one institution.

pub mod assess;
pub mod cleaning;
pub mod config;
pub mod corpus;
pub mod doi;
pub mod error;
pub mod harvest;
pub mod matching;
pub mod mediated;
pub mod model;
pub mod rads;
pub mod sources;
pub mod tabular;
pub mod text;

pub use error::{ConfigError, MalformedDoi, ProfileError, SchemaError, SourceError};
pub use matching::{match_institution, InstitutionMatcher};
pub use model::*;
pub use text::{normalize_doi, normalize_text};
