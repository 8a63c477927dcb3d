//! Versioned JSON documents for reports, scan results and tensors.
//!
//! Every document is `{"schema_version": 1, "kind": ..., "data": ...}`.
//! Keys are sorted and every float is rounded to 12 significant digits, so
//! equal inputs give byte-identical files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};
use sst_hotspot_core::eval::non_overlapping;
use sst_hotspot_core::stscan::{ScanResult, ScoredCylinder};
use sst_hotspot_core::{CountTensor, HotspotReport};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const KIND_HOTSPOT: &str = "hotspot_report";
pub const KIND_SCAN: &str = "scan_result";
pub const KIND_TENSORS: &str = "tensors";
pub const KIND_COMPARISON: &str = "comparison";

#[derive(Debug, Serialize, Deserialize)]
struct Envelope<T> {
    schema_version: u32,
    kind: String,
    data: T,
}

/// Scan output with labels and the significant clusters pulled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanDocument {
    pub region_labels: Vec<String>,
    pub time_labels: Vec<String>,
    pub alpha: f64,
    /// Significant cylinders at `alpha` that share no region with a
    /// higher-scoring one.
    pub significant: Vec<ScoredCylinder>,
    /// Number of cylinders scored; `result.cylinders` may hold fewer.
    pub cylinders_scored: usize,
    pub result: ScanResult,
}

impl ScanDocument {
    /// Keeps the `keep` best cylinders in `result` (all when `keep` is 0).
    pub fn new(
        mut result: ScanResult,
        region_labels: Vec<String>,
        time_labels: Vec<String>,
        alpha: f64,
        keep: usize,
    ) -> Self {
        let significant = non_overlapping(&result, alpha).into_iter().cloned().collect();
        let cylinders_scored = result.cylinders.len();
        if keep > 0 {
            result.cylinders.truncate(keep);
        }
        Self {
            region_labels,
            time_labels,
            alpha,
            significant,
            cylinders_scored,
            result,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorDocument {
    pub population: CountTensor,
    pub cases: CountTensor,
    pub unknown_categories: BTreeMap<String, Vec<String>>,
}

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn to_json<T: Serialize>(kind: &str, data: &T) -> Result<String> {
    let mut value = serde_json::to_value(Envelope {
        schema_version: SCHEMA_VERSION,
        kind: kind.to_string(),
        data,
    })?;
    round_floats(&mut value);
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

pub fn from_json<T: DeserializeOwned>(kind: &str, text: &str) -> Result<T> {
    let env: Envelope<Value> = serde_json::from_str(text)?;
    if env.schema_version != SCHEMA_VERSION {
        return Err(Error::Report(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            env.schema_version
        )));
    }
    if env.kind != kind {
        return Err(Error::Report(format!(
            "expected a `{kind}` document, found `{}`",
            env.kind
        )));
    }
    Ok(serde_json::from_value(env.data)?)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_report(report: &HotspotReport, path: &Path) -> Result<()> {
    write_text(path, &to_json(KIND_HOTSPOT, report)?)
}

pub fn read_report(path: &Path) -> Result<HotspotReport> {
    from_json(KIND_HOTSPOT, &read_text(path)?)
}

pub fn write_scan(doc: &ScanDocument, path: &Path) -> Result<()> {
    write_text(path, &to_json(KIND_SCAN, doc)?)
}

pub fn read_scan(path: &Path) -> Result<ScanDocument> {
    from_json(KIND_SCAN, &read_text(path)?)
}
