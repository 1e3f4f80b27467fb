//! Files in and out: run configs, instance files and record tables.

mod config;
mod instance_file;
mod records;

pub use config::{parse_config, parse_config_str, Command, Format, RunConfig};
pub use instance_file::{load_instance, parse_instance_str, render_instance, write_instance};
pub use records::{
    checksum, fmt_sig17, read_records_csv, read_records_json, render_records, sort_records,
    write_records, CSV_HEADER,
};

use std::path::PathBuf;

use thiserror::Error;

/// Problems with user-supplied configuration or input files.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },

    #[error("{file}: at `{at}`: {message}")]
    Syntax {
        file: String,
        at: String,
        message: String,
    },

    #[error("{file}: invalid `{at}`: {message}")]
    Invalid {
        file: String,
        at: String,
        message: String,
    },

    #[error("{file}: {source}")]
    Instance {
        file: String,
        #[source]
        source: crate::Error,
    },
}

/// Problems producing or reading record tables.
#[derive(Debug, Error)]
pub enum RecordsError {
    #[error("no records to write")]
    Empty,

    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("bad record JSON at `{at}`: {message}")]
    Json { at: String, message: String },
}

/// Reads one JSON document and rejects trailing content. Errors are
/// `(path, message)`, with `.` for the document root.
pub(crate) fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, (String, String)> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut *de)
        .map_err(|e| (e.path().to_string(), e.inner().to_string()))?;
    de.end().map_err(|e| (".".to_string(), e.to_string()))?;
    Ok(value)
}
