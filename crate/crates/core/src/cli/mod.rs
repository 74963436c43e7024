//! Config-driven verification runs, shared by the binary and the FFI layer.

pub mod config;
pub mod run;

pub use config::{parse_config, Backend, Case, FieldSource, RunConfig};
pub use run::{error_exit_code, run, IdentityReport, Report, RunOptions};

use std::path::Path;

use crate::error::{Error, Result};

/// Parses and runs a config given as text. Relative CSV paths resolve
/// against `base_dir`.
pub fn verify_text(text: &str, base_dir: Option<&Path>, opts: &RunOptions) -> Result<Report> {
    let cfg = parse_config(text, base_dir)?;
    run(&cfg, opts)
}

/// Reads a config file and runs it.
pub fn verify_file(path: &Path, opts: &RunOptions) -> Result<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    verify_text(&text, path.parent(), opts)
}
