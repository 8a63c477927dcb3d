//! CSV records and their aggregation into count tensors.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use sst_hotspot_core::{CountTensor, Mode, ModeKind};

use crate::error::{Error, Result};
use crate::schema::RecordSchema;

/// One CSV row: the mapped fields in [`RecordSchema::columns`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub fields: Vec<String>,
    pub count: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParsedRecords {
    pub records: Vec<Record>,
    /// Values outside a column's declared category list, per column.
    pub unknown: BTreeMap<String, Vec<String>>,
}

impl ParsedRecords {
    pub fn total(&self) -> f64 {
        self.records.iter().map(|r| r.count).sum()
    }
}

pub fn parse_records<R: Read>(input: R, schema: &RecordSchema) -> Result<ParsedRecords> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = rdr.headers()?.clone();
    let mut position = HashMap::new();
    for (i, h) in header.iter().enumerate() {
        if position.insert(h.to_string(), i).is_some() {
            return Err(Error::DuplicateHeader(h.to_string()));
        }
    }
    let find = |c: &str| {
        position
            .get(c)
            .copied()
            .ok_or_else(|| Error::MissingColumn(c.to_string()))
    };
    let columns = schema.columns();
    let idx = columns.iter().map(|c| find(c)).collect::<Result<Vec<_>>>()?;
    let count_idx = schema.count.as_deref().map(find).transpose()?;

    let mut out = ParsedRecords::default();
    let mut unknown: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != header.len() {
            return Err(Error::BadRow {
                line,
                expected: header.len(),
                found: row.len(),
            });
        }
        let fields: Vec<String> = idx.iter().map(|&i| row[i].to_string()).collect();
        for (col, value) in columns.iter().zip(&fields) {
            if let Some(list) = schema.categories.get(*col) {
                if !list.contains(value) {
                    unknown.entry(col.to_string()).or_default().insert(value.clone());
                }
            }
        }
        let count = match count_idx {
            None => 1.0,
            Some(i) => {
                let raw = &row[i];
                match raw.parse::<f64>() {
                    Ok(v) if v.is_finite() && v >= 0.0 => v,
                    _ => {
                        return Err(Error::BadCount {
                            line,
                            value: raw.to_string(),
                        })
                    }
                }
            }
        };
        out.records.push(Record { fields, count });
    }
    out.unknown = unknown
        .into_iter()
        .map(|(k, v)| (k, v.into_iter().collect()))
        .collect();
    Ok(out)
}

/// Category lists per mapped column: the declared list, or values in order
/// of first appearance across `sets`.
pub fn categories(schema: &RecordSchema, sets: &[&ParsedRecords]) -> Result<Vec<Vec<String>>> {
    let columns = schema.columns();
    let mut out = Vec::with_capacity(columns.len());
    for (k, col) in columns.iter().enumerate() {
        if let Some(list) = schema.categories.get(*col) {
            let bad: BTreeSet<&String> = sets
                .iter()
                .flat_map(|s| s.records.iter().map(move |r| &r.fields[k]))
                .filter(|v| !list.contains(v))
                .collect();
            if !bad.is_empty() {
                return Err(Error::UnknownCategory {
                    column: col.to_string(),
                    values: bad.into_iter().cloned().collect(),
                });
            }
            out.push(list.clone());
        } else {
            let mut seen = BTreeSet::new();
            let mut list = Vec::new();
            for r in sets.iter().flat_map(|s| &s.records) {
                if seen.insert(r.fields[k].as_str()) {
                    list.push(r.fields[k].clone());
                }
            }
            out.push(list);
        }
    }
    Ok(out)
}

/// Tensor modes from per-column category lists; bundles become the
/// Cartesian product of their columns.
fn modes(schema: &RecordSchema, cats: &[Vec<String>]) -> Vec<Mode> {
    let mut modes = vec![
        Mode::new(ModeKind::Space, schema.space.clone(), cats[0].clone()),
        Mode::new(ModeKind::Time, schema.time.clone(), cats[1].clone()),
    ];
    let mut k = 2;
    for b in &schema.attributes {
        let mut labels = vec![String::new()];
        for (j, _) in b.columns.iter().enumerate() {
            labels = labels
                .iter()
                .flat_map(|prefix| {
                    cats[k + j].iter().map(move |c| {
                        if j == 0 {
                            c.clone()
                        } else {
                            format!("{prefix}|{c}")
                        }
                    })
                })
                .collect();
        }
        modes.push(Mode::new(ModeKind::Attribute, b.name.clone(), labels));
        k += b.columns.len();
    }
    modes
}

/// Sums record counts into a dense tensor over the given category lists.
pub fn build_with(
    records: &ParsedRecords,
    schema: &RecordSchema,
    cats: &[Vec<String>],
) -> Result<CountTensor> {
    let lookup: Vec<HashMap<&str, usize>> = cats
        .iter()
        .map(|c| c.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect())
        .collect();
    let modes = modes(schema, cats);
    let dims: Vec<usize> = modes.iter().map(Mode::dim).collect();
    let mut values = vec![0.0; dims.iter().product()];
    for r in &records.records {
        let mut col = 0;
        let mut offset = 0;
        let mut stride = 1;
        for (m, d) in dims.iter().enumerate() {
            let width = if m < 2 {
                1
            } else {
                schema.attributes[m - 2].columns.len()
            };
            let mut idx = 0;
            for j in 0..width {
                let c = col + j;
                let Some(&i) = lookup[c].get(r.fields[c].as_str()) else {
                    return Err(Error::UnknownCategory {
                        column: schema.columns()[c].to_string(),
                        values: vec![r.fields[c].clone()],
                    });
                };
                idx = idx * cats[c].len() + i;
            }
            col += width;
            offset += idx * stride;
            stride *= d;
        }
        values[offset] += r.count;
    }
    CountTensor::new(modes, values).map_err(Error::core("data-io"))
}

pub fn build_tensor(records: &ParsedRecords, schema: &RecordSchema) -> Result<CountTensor> {
    let cats = categories(schema, &[records])?;
    build_with(records, schema, &cats)
}

/// Population and case tensors over shared categories, population first in
/// the first-appearance order.
pub fn build_pair(
    population: &ParsedRecords,
    cases: &ParsedRecords,
    schema: &RecordSchema,
) -> Result<(CountTensor, CountTensor)> {
    let cats = categories(schema, &[population, cases])?;
    Ok((
        build_with(population, schema, &cats)?,
        build_with(cases, schema, &cats)?,
    ))
}
