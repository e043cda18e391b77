//! Artifact writing: atomic file creation and traceability headers.
//!
//! Every output file starts with `#` comment lines recording the config
//! hash, the master seed, and the code version, so a file can always be
//! traced to the run that produced it. Files are written to a temporary
//! sibling and renamed into place; a failed run leaves no partial artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn artifact_header(config_hash: &str, seed: u64) -> String {
    format!("# config_hash={config_hash} seed={seed} version={VERSION}\n")
}

/// Write-then-rename into `path`.
pub fn atomic_write(path: &Path, content: &str) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io("creating output directory", e))?;
    let mut tmp = PathBuf::from(path);
    let mut name = path
        .file_name()
        .map(|s| s.to_os_string())
        .unwrap_or_default();
    name.push(".tmp");
    tmp.set_file_name(name);
    fs::write(&tmp, content).map_err(|e| CliError::io("writing artifact", e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io("renaming artifact", e))?;
    Ok(())
}

/// Minimal JSON string escaping for the summary record.
pub fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}
