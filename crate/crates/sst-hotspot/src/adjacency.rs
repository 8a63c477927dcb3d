//! Region adjacency pairs and centroid tables.

use std::collections::HashMap;
use std::io::Read;

use sst_hotspot_core::NeighborMatrix;

use crate::error::{Error, Result};

fn index(regions: &[String]) -> HashMap<&str, usize> {
    regions.iter().enumerate().map(|(i, r)| (r.as_str(), i)).collect()
}

/// Reads `region_a,region_b` rows. A pair listed once links both ways.
pub fn parse_adjacency<R: Read>(
    input: R,
    regions: &[String],
    has_header: bool,
) -> Result<NeighborMatrix> {
    let ids = index(regions);
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut pairs = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 2 {
            return Err(Error::BadRow {
                line,
                expected: 2,
                found: row.len(),
            });
        }
        let lookup = |name: &str| {
            ids.get(name).copied().ok_or_else(|| Error::UnknownRegion {
                context: format!("adjacency line {line}"),
                region: name.to_string(),
            })
        };
        let (a, b) = (lookup(&row[0])?, lookup(&row[1])?);
        if a == b {
            return Err(Error::SelfPair {
                context: format!("adjacency line {line}"),
                region: row[0].to_string(),
            });
        }
        pairs.push((a, b));
    }
    NeighborMatrix::from_pairs(regions.len(), &pairs).map_err(Error::core("data-io"))
}

/// Reads a `region,x,y` table with a header row. Every region needs a
/// centroid.
pub fn parse_centroids<R: Read>(input: R, regions: &[String]) -> Result<Vec<(f64, f64)>> {
    let ids = index(regions);
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = rdr.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let (ri, xi, yi) = (col("region")?, col("x")?, col("y")?);
    let mut out: Vec<Option<(f64, f64)>> = vec![None; regions.len()];
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let num = |i: usize| {
            row[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::BadCoordinate {
                    line,
                    value: row[i].to_string(),
                })
        };
        let &r = ids.get(&row[ri]).ok_or_else(|| Error::UnknownRegion {
            context: format!("centroids line {line}"),
            region: row[ri].to_string(),
        })?;
        out[r] = Some((num(xi)?, num(yi)?));
    }
    out.into_iter()
        .zip(regions)
        .map(|(c, r)| c.ok_or_else(|| Error::MissingCentroid(r.clone())))
        .collect()
}
