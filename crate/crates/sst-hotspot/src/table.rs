//! Comparison tables as CSV and JSON.

use serde::{Deserialize, Serialize};
use sst_hotspot_core::eval::Comparison;

use crate::error::{Error, Result};
use crate::report::{to_json, KIND_COMPARISON};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonDocument {
    pub region_labels: Vec<String>,
    pub comparison: Comparison,
}

fn names(idx: &[usize], labels: &[String]) -> String {
    idx.iter()
        .map(|&i| labels[i].as_str())
        .collect::<Vec<_>>()
        .join(";")
}

/// One row per method and level; percentages with two decimals, region sets
/// as `;`-separated labels.
pub fn comparison_csv(c: &Comparison, labels: &[String]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "method",
        "level",
        "precision",
        "recall",
        "f1",
        "detected",
        "reference",
        "intersection",
    ])?;
    for row in &c.rows {
        let m = &row.metrics;
        w.write_record([
            row.method.clone(),
            row.level.clone(),
            format!("{:.2}", m.precision),
            format!("{:.2}", m.recall),
            format!("{:.2}", m.f1),
            names(&m.detected, labels),
            names(&m.reference, labels),
            names(&m.intersection, labels),
        ])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io("comparison table", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn comparison_json(c: &Comparison, labels: &[String]) -> Result<String> {
    to_json(
        KIND_COMPARISON,
        &ComparisonDocument {
            region_labels: labels.to_vec(),
            comparison: c.clone(),
        },
    )
}
