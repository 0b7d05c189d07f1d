//! CSV form of a [`RunTrace`].
//!
//! ```text
//! # n=2 m=0 permanent_rows=10
//! # opt=0.25 source=brute-forced
//! iter,seconds,objective,cuts_added,cuts_purged,pool_size,min_eig
//! 0,0.0001,0.5,0,0,0,-0.25
//! 1,0.0003,0.3,1,0,1,-0.04
//! # status=iteration-limit
//! ```
//!
//! The per-provenance split of `cuts_added` is not stored; a trace read back
//! counts all added cuts under the first provenance.

use std::fmt::Write as _;

use super::instance::format_number;
use crate::engine::{IterRecord, RunTrace, Status};
use crate::error::{Error, Result};
use crate::harness::{OptSource, OptValue};

pub const TRACE_HEADER: &str = "iter,seconds,objective,cuts_added,cuts_purged,pool_size,min_eig";

#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub trace: RunTrace,
    pub opt: Option<OptValue>,
}

pub fn write_trace(file: &TraceFile) -> String {
    let t = &file.trace;
    let mut out = String::new();
    let permanent = t.records.first().map_or(0, |r| r.permanent_rows);
    let _ = writeln!(out, "# n={} m={} permanent_rows={permanent}", t.n, t.m);
    if let Some(opt) = file.opt {
        let _ = writeln!(out, "# opt={} source={}", format_number(opt.value), opt.source);
    }
    let _ = writeln!(out, "{TRACE_HEADER}");
    for r in &t.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iter,
            format_number(r.seconds),
            format_number(r.objective),
            r.cuts_added(),
            r.cuts_purged,
            r.pool_size,
            format_number(r.min_eig)
        );
    }
    let _ = writeln!(out, "# status={}", t.status);
    if let Some(d) = &t.diagnostic {
        let _ = writeln!(out, "# diagnostic={}", d.replace(['\n', '\r'], " "));
    }
    out
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn field<V: std::str::FromStr>(line: usize, tok: &str, name: &str) -> Result<V> {
    tok.trim()
        .parse()
        .map_err(|_| err(line, format!("bad {name} `{}`", tok.trim())))
}

pub fn read_trace(text: &str) -> Result<TraceFile> {
    let mut n = None;
    let mut m = None;
    let mut permanent = 0;
    let mut opt_value = None;
    let mut opt_source = None;
    let mut status = None;
    let mut diagnostic = None;
    let mut header_seen = false;
    let mut records = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        if let Some(meta) = raw.strip_prefix('#') {
            let meta = meta.trim();
            if let Some(d) = meta.strip_prefix("diagnostic=") {
                diagnostic = Some(d.to_string());
                continue;
            }
            for pair in meta.split_whitespace() {
                let Some((k, v)) = pair.split_once('=') else { continue };
                match k {
                    "n" => n = Some(field::<usize>(line, v, "n")?),
                    "m" => m = Some(field::<usize>(line, v, "m")?),
                    "permanent_rows" => permanent = field(line, v, "permanent_rows")?,
                    "opt" => opt_value = Some(field::<f64>(line, v, "opt")?),
                    "source" => opt_source = Some(v.parse::<OptSource>().map_err(|e| err(line, e.to_string()))?),
                    "status" => status = Some(v.parse::<Status>().map_err(|e| err(line, e.to_string()))?),
                    _ => {}
                }
            }
            continue;
        }
        if !header_seen {
            if raw != TRACE_HEADER {
                return Err(err(line, format!("expected header `{TRACE_HEADER}`")));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = raw.split(',').collect();
        if cols.len() != 7 {
            return Err(err(line, format!("expected 7 columns, found {}", cols.len())));
        }
        let iter: usize = field(line, cols[0], "iter")?;
        if iter != records.len() {
            return Err(err(line, format!("iteration {iter} out of sequence, expected {}", records.len())));
        }
        records.push(IterRecord {
            iter,
            seconds: field(line, cols[1], "seconds")?,
            objective: field(line, cols[2], "objective")?,
            added_by: [field(line, cols[3], "cuts_added")?, 0, 0, 0],
            cuts_purged: field(line, cols[4], "cuts_purged")?,
            pool_size: field(line, cols[5], "pool_size")?,
            min_eig: field(line, cols[6], "min_eig")?,
            permanent_rows: permanent,
        });
    }

    if !header_seen {
        return Err(err(last_line.max(1), "missing CSV header"));
    }
    let status = status.ok_or_else(|| err(last_line, "missing `# status=` line"))?;
    let opt = match (opt_value, opt_source) {
        (Some(value), source) => Some(OptValue {
            value,
            source: source.unwrap_or(OptSource::Supplied),
        }),
        (None, _) => None,
    };
    Ok(TraceFile {
        trace: RunTrace {
            n: n.ok_or_else(|| err(last_line, "missing `# n=` metadata"))?,
            m: m.ok_or_else(|| err(last_line, "missing `# m=` metadata"))?,
            records,
            status,
            diagnostic,
        },
        opt,
    })
}
