//! Output paths, provenance headers and file writing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::RunConfig;
use super::{CliError, OUT_DIR_ENV};

/// Where a command writes: the requested path, or `default`, resolved
/// against the output-directory override when relative.
pub fn resolve_path(requested: Option<&Path>, default: &str) -> PathBuf {
    let path = requested
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(default));
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path,
    }
}

/// `dir/name.ext` → `dir/name{suffix}`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Effective configuration and seed, embedded in every output.
pub struct Provenance<'a> {
    pub command: &'a str,
    pub config: &'a RunConfig,
}

impl Provenance<'_> {
    pub fn csv_header(&self) -> String {
        format!(
            "# {} {} {}\n# seed: {}\n# config: {}\n",
            env!("CARGO_PKG_NAME"),
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.config.sampler.seed,
            self.config.to_json()
        )
    }

    pub fn json(&self, results: Value) -> Value {
        json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.config.sampler.seed,
            "config": serde_json::to_value(self.config).expect("config is serialisable"),
            "results": results,
        })
    }
}

/// CSV body builder: comma separated, LF line ends, shortest round-trip floats.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: String, columns: &[&str]) -> Self {
        let mut text = header;
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            push_float(&mut self.text, *v);
        }
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Shortest round-trip form; exponent notation outside `[1e-4, 1e15)`.
pub fn push_float(out: &mut String, v: f64) {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        let _ = write!(out, "{v:e}");
    } else {
        let _ = write!(out, "{v}");
    }
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, contents).map_err(io)
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("json value is serialisable");
    text.push('\n');
    write(path, &text)
}
