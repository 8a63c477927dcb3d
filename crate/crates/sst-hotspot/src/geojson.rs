//! GeoJSON output: one feature per region carrying its `DS` value, role and
//! cluster memberships.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sst_hotspot_core::HotspotReport;

use crate::error::{Error, Result};
use crate::report::{read_text, round_sig, write_text};

/// Region polygons keyed by region id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegionGeometry {
    pub geometries: BTreeMap<String, Value>,
}

impl RegionGeometry {
    /// Reads a FeatureCollection. A feature's id is `properties[id_property]`,
    /// falling back to the feature's own `id`.
    pub fn from_geojson(text: &str, id_property: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)?;
        let features = doc
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Report("geometry is not a FeatureCollection".into()))?;
        let mut geometries = BTreeMap::new();
        for (i, f) in features.iter().enumerate() {
            let id = f
                .get("properties")
                .and_then(|p| p.get(id_property))
                .or_else(|| f.get("id"))
                .and_then(|v| match v {
                    Value::String(s) => Some(s.clone()),
                    Value::Number(n) => Some(n.to_string()),
                    _ => None,
                })
                .ok_or_else(|| Error::Report(format!("feature {i} has no `{id_property}`")))?;
            let geometry = f.get("geometry").cloned().unwrap_or(Value::Null);
            geometries.insert(id, geometry);
        }
        Ok(Self { geometries })
    }

    pub fn load(path: &Path, id_property: &str) -> Result<Self> {
        Self::from_geojson(&read_text(path)?, id_property)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Center,
    Likely,
    First,
    Second,
    None,
}

/// The strongest role a region plays in the report.
pub fn roles(report: &HotspotReport) -> Vec<Role> {
    let first = report.first.regions();
    let second = report.second.regions();
    (0..report.region_labels.len())
        .map(|i| {
            if report.spatial.sc.contains(&i) {
                Role::Center
            } else if report.spatial.likely_cluster.contains(&i) {
                Role::Likely
            } else if first.contains(&i) {
                Role::First
            } else if second.contains(&i) {
                Role::Second
            } else {
                Role::None
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeoJsonOutput {
    pub text: String,
    pub written: usize,
    /// Regions left out for lack of geometry.
    pub skipped: Vec<String>,
}

pub fn render_geojson(report: &HotspotReport, geo: &RegionGeometry) -> Result<GeoJsonOutput> {
    let roles = roles(report);
    let label = |i: &usize| report.region_labels[*i].clone();
    let mut features = Vec::new();
    let mut skipped = Vec::new();
    for (i, name) in report.region_labels.iter().enumerate() {
        let Some(geometry) = geo.geometries.get(name) else {
            log::warn!("no geometry for region `{name}`; feature skipped");
            skipped.push(name.clone());
            continue;
        };
        let clusters = |set: &sst_hotspot_core::eigenmatch::ClusterSet| -> Vec<String> {
            set.clusters
                .iter()
                .filter(|c| c.members.contains(&i))
                .map(|c| label(&c.center))
                .collect()
        };
        features.push(json!({
            "type": "Feature",
            "id": name,
            "geometry": geometry,
            "properties": {
                "id": name,
                "ds": round_sig(report.ds.entries[i]),
                "role": roles[i],
                "first_clusters": clusters(&report.first),
                "second_clusters": clusters(&report.second),
            },
        }));
    }
    let written = features.len();
    let doc = json!({ "type": "FeatureCollection", "features": features });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    Ok(GeoJsonOutput {
        text,
        written,
        skipped,
    })
}

pub fn write_geojson(
    report: &HotspotReport,
    geo: &RegionGeometry,
    path: &Path,
) -> Result<GeoJsonOutput> {
    let out = render_geojson(report, geo)?;
    write_text(path, &out.text)?;
    Ok(out)
}
