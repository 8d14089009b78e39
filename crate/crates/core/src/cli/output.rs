//! Output headers and atomic file writes.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Value};

use super::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn config_value(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

/// `#` comment lines carrying the version and the effective config.
pub fn csv_header(cfg: &RunConfig) -> String {
    format!("# gfdim {VERSION}\n# config: {}\n", config_value(cfg))
}

/// JSON document with `version` and `config` ahead of the payload fields.
pub fn json_document(cfg: &RunConfig, payload: Value) -> String {
    let mut doc = json!({ "version": VERSION, "config": config_value(cfg) });
    if let (Value::Object(d), Value::Object(p)) = (&mut doc, payload) {
        d.extend(p);
    }
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}

/// Writes to a sibling temp file, then renames over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn emit(cfg: &RunConfig, contents: &str) -> io::Result<()> {
    match &cfg.out {
        Some(p) => write_atomic(Path::new(p), contents),
        None => io::stdout().lock().write_all(contents.as_bytes()),
    }
}
