//! File formats: instances, run traces, optimum sidecars and MPS export.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::{OptSource, OptValue};
use crate::model::QcqpProblem;
use crate::scalar::Scalar;

mod instance;
mod mps;
mod trace;

pub use instance::{format_number, parse_instance, serialize_instance};
pub use mps::write_mps;
pub use trace::{read_trace, write_trace, TraceFile, TRACE_HEADER};

pub const INSTANCE_EXT: &str = "qcqp";
pub const TRACE_EXT: &str = "csv";
pub const OPT_EXT: &str = "opt";

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

/// Reads a file, prefixing parse errors with its path.
fn read_with<V>(path: &Path, parse: impl FnOnce(&str) -> Result<V>) -> Result<V> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse(&text).map_err(|e| match e {
        Error::Parse { line, msg } => io_err(path, format!("line {line}: {msg}")),
        other => io_err(path, other),
    })
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn read_instance<T: Scalar>(path: &Path) -> Result<QcqpProblem<T>> {
    read_with(path, parse_instance)
}

pub fn read_trace_file(path: &Path) -> Result<TraceFile> {
    read_with(path, read_trace)
}

/// Text of a `.opt` file: `<value> <source>`.
pub fn format_opt(opt: &OptValue) -> String {
    format!("{} {}\n", format_number(opt.value), opt.source)
}

pub fn parse_opt(text: &str) -> Result<OptValue> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    let bad = |msg: &str| Error::Parse { line: 1, msg: msg.into() };
    let value: f64 = toks
        .first()
        .ok_or_else(|| bad("empty optimum file"))?
        .parse()
        .map_err(|_| bad("optimum is not a number"))?;
    let source = match toks.get(1) {
        Some(s) => s.parse().map_err(|e: Error| bad(&e.to_string()))?,
        None => OptSource::Supplied,
    };
    if toks.len() > 2 {
        return Err(bad("trailing fields after the optimum source"));
    }
    Ok(OptValue { value, source })
}

/// `<dir>/<stem>.opt` next to an instance file.
pub fn opt_sidecar(instance: &Path) -> PathBuf {
    instance.with_extension(OPT_EXT)
}

/// The sidecar optimum for `instance`, if one exists.
pub fn read_opt_sidecar(instance: &Path) -> Result<Option<OptValue>> {
    let path = opt_sidecar(instance);
    if !path.exists() {
        return Ok(None);
    }
    read_with(&path, parse_opt).map(Some)
}

/// Files in `dir` with extension `ext`, keyed by file stem, in name order.
pub fn list_dir(dir: &Path, ext: &str) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| io_err(dir, e))? {
        let path = entry.map_err(|e| io_err(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == ext) {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.insert(stem.to_string(), path);
            }
        }
    }
    Ok(out)
}

/// Every `.csv` trace in `dir`, keyed by instance name.
pub fn read_trace_dir(dir: &Path) -> Result<BTreeMap<String, TraceFile>> {
    list_dir(dir, TRACE_EXT)?
        .into_iter()
        .map(|(name, path)| Ok((name, read_trace_file(&path)?)))
        .collect()
}
