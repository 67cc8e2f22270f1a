//! Process exit codes.

use datahunt_core::error::{ConfigError, ProfileError, SchemaError, SourceError};
use datahunt_core::harvest::HarvestError;

pub const GENERIC: u8 = 1;
/// Bad config or usage; clap also exits with 2 on usage errors.
pub const CONFIG: u8 = 2;
pub const IO: u8 = 3;
pub const SOURCE: u8 = 4;
pub const SCHEMA: u8 = 5;

/// Walks the error chain and returns the code of the first recognized cause.
pub fn code_for(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() || cause.is::<ProfileError>() {
            return CONFIG;
        }
        if let Some(SchemaError::Io { .. }) = cause.downcast_ref::<SchemaError>() {
            return IO;
        }
        if cause.is::<SchemaError>() || cause.is::<csv::Error>() || cause.is::<serde_json::Error>() {
            return SCHEMA;
        }
        if cause.is::<HarvestError>() || cause.is::<SourceError>() {
            return SOURCE;
        }
        if cause.is::<std::io::Error>() {
            return IO;
        }
    }
    GENERIC
}

/// The error chain on one line, skipping causes already spelled out by
/// the message above them.
pub fn describe(err: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in err.chain() {
        let msg = cause.to_string();
        if !out.contains(&msg) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&msg);
        }
    }
    out
}
