//! Library side of the `oamproca` command-line tool: configuration parsing,
//! subcommand execution and result serialization.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

use std::path::Path;

use config::{Document, RunConfig};
use error::{CliError, Result};

/// Build a run configuration from an optional file (a config file or a
/// previous result file) followed by `key=value` overrides applied in order.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig> {
    let mut doc = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p.display().to_string(), e))?;
            Document::parse_any(&text)?
        }
        None => Document::parse("")?,
    };
    for assignment in overrides {
        doc.set(assignment)?;
    }
    RunConfig::from_document(&doc)
}
