//! Mapping from CSV columns to tensor modes.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Columns merged into one attribute mode. Its categories are the Cartesian
/// product of the member columns' categories, first column slowest, labels
/// joined with `|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bundle {
    pub name: String,
    pub columns: Vec<String>,
}

/// Which column is space, which is time, how the remaining columns are
/// grouped into attribute modes and where counts come from.
///
/// ```json
/// {
///   "space": "county",
///   "time": "year",
///   "attributes": [{ "name": "demographic", "columns": ["age", "sex", "race"] }],
///   "count": "count",
///   "categories": { "sex": ["F", "M"] }
/// }
/// ```
///
/// Categories are numbered in order of first appearance unless a column has
/// an explicit list in `categories`. Time windows follow that order, so list
/// the time categories whenever the input is not sorted by time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordSchema {
    pub space: String,
    pub time: String,
    #[serde(default)]
    pub attributes: Vec<Bundle>,
    /// Without a count column every row counts 1.
    #[serde(default)]
    pub count: Option<String>,
    #[serde(default)]
    pub categories: BTreeMap<String, Vec<String>>,
}

impl RecordSchema {
    pub fn new(space: impl Into<String>, time: impl Into<String>) -> Self {
        Self {
            space: space.into(),
            time: time.into(),
            attributes: Vec::new(),
            count: None,
            categories: BTreeMap::new(),
        }
    }

    pub fn with_bundle(mut self, name: impl Into<String>, columns: &[&str]) -> Self {
        self.attributes.push(Bundle {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
        });
        self
    }

    pub fn with_count(mut self, column: impl Into<String>) -> Self {
        self.count = Some(column.into());
        self
    }

    pub fn with_categories(mut self, column: impl Into<String>, values: &[&str]) -> Self {
        self.categories
            .insert(column.into(), values.iter().map(|v| v.to_string()).collect());
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Mapped columns in mode order: space, time, then each bundle's columns.
    pub fn columns(&self) -> Vec<&str> {
        let mut out = vec![self.space.as_str(), self.time.as_str()];
        for b in &self.attributes {
            out.extend(b.columns.iter().map(String::as_str));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for c in self.columns() {
            if !seen.insert(c) {
                return Err(Error::Schema(format!("column `{c}` is mapped twice")));
            }
        }
        if let Some(count) = &self.count {
            if seen.contains(count.as_str()) {
                return Err(Error::Schema(format!(
                    "count column `{count}` is also mapped to a mode"
                )));
            }
        }
        let mut names = BTreeSet::new();
        for b in &self.attributes {
            if b.columns.is_empty() {
                return Err(Error::Schema(format!("bundle `{}` has no columns", b.name)));
            }
            if !names.insert(b.name.as_str()) {
                return Err(Error::Schema(format!("bundle name `{}` repeats", b.name)));
            }
        }
        for (column, values) in &self.categories {
            if !seen.contains(column.as_str()) {
                return Err(Error::Schema(format!(
                    "categories given for unmapped column `{column}`"
                )));
            }
            let distinct: BTreeSet<_> = values.iter().collect();
            if distinct.len() != values.len() || values.is_empty() {
                return Err(Error::Schema(format!(
                    "category list for `{column}` must be non-empty without repeats"
                )));
            }
        }
        Ok(())
    }
}
