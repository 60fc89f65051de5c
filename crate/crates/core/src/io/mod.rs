//! Persistence: the schema and data text formats and CSV snowflake
//! ingest. Both text formats round-trip canonically: loading a saved
//! model and saving it again reproduces the bytes.

pub mod csv_ingest;
pub mod data_text;
pub mod schema_text;

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::model::{ModelError, Schema};

pub use csv_ingest::{ingest_csv, IngestFile, IngestMap, IngestReport};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IoError {
    #[error("{file}:{line}: parse error: {message}")]
    Parse {
        file: String,
        line: u32,
        message: String,
    },
    #[error("{file}:{line}: {source}")]
    Model {
        file: String,
        line: u32,
        source: ModelError,
    },
    #[error("cannot read `{0}`: {1}")]
    Read(String, String),
    #[error("cannot write `{0}`: {1}")]
    Write(String, String),
}

impl IoError {
    fn parse(file: &str, line: u32, message: impl fmt::Display) -> Self {
        IoError::Parse {
            file: file.to_string(),
            line,
            message: message.to_string(),
        }
    }

    fn model(file: &str, line: u32, source: ModelError) -> Self {
        IoError::Model {
            file: file.to_string(),
            line,
            source,
        }
    }
}

/// Load a schema file and optionally a data file.
pub fn load(schema_path: &Path, data_path: Option<&Path>) -> Result<Schema, IoError> {
    let text = read(schema_path)?;
    let mut schema = schema_text::parse_schema(&display_name(schema_path), &text)?;
    schema.name = schema_path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    if let Some(data_path) = data_path {
        let text = read(data_path)?;
        data_text::parse_data(&mut schema, &display_name(data_path), &text)?;
    }
    Ok(schema)
}

/// Save the model as canonical schema and data files.
pub fn save(schema: &Schema, schema_path: &Path, data_path: &Path) -> Result<(), IoError> {
    write(schema_path, &schema_text::render_schema(schema))?;
    write(data_path, &data_text::render_data(schema))
}

fn display_name(path: &Path) -> String {
    path.display().to_string()
}

fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::Read(display_name(path), e.to_string()))
}

fn write(path: &Path, content: &str) -> Result<(), IoError> {
    std::fs::write(path, content).map_err(|e| IoError::Write(display_name(path), e.to_string()))
}

/// Quote a token unless it is safe to print bare: letters, digits and
/// `_ - .` with no leading quote characters.
pub(crate) fn render_token(token: &str) -> String {
    let bare = !token.is_empty()
        && token
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if bare && token != "null" {
        token.to_string()
    } else {
        format!("\"{}\"", token.replace('\\', "\\\\").replace('"', "\\\""))
    }
}
