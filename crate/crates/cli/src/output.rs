use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const OUT_DIR_ENV: &str = "EGLAB_OUT_DIR";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: u64,
    pub version: &'static str,
    pub started: String,
    pub elapsed_seconds: f64,
}

pub struct Run {
    command: &'static str,
    started: DateTime<Utc>,
    clock: Instant,
}

impl Run {
    pub fn start(command: &'static str) -> Self {
        Run {
            command,
            started: Utc::now(),
            clock: Instant::now(),
        }
    }

    pub fn manifest(&self, config: Value, seed: u64) -> RunManifest {
        RunManifest {
            command: self.command.into(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            started: self.started.to_rfc3339_opts(SecondsFormat::Millis, true),
            elapsed_seconds: self.clock.elapsed().as_secs_f64(),
        }
    }
}

/// Relative paths land under `EGLAB_OUT_DIR` when it is set.
pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// `<path>.<suffix>`, keeping the full original file name.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Writes the primary output (to stdout when `out` is `None`) and, for file
/// output, the manifest alongside it.
pub fn emit(out: Option<&Path>, contents: &str, manifest: &RunManifest) -> Result<(), CliError> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write stdout: {e}")))
        }
        Some(path) => {
            write_file(path, contents)?;
            let mut m = serde_json::to_string_pretty(manifest).expect("manifest serializes");
            m.push('\n');
            write_file(&sibling(path, "manifest.json"), &m)
        }
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}
