//! Writes a synthetic data set as the same files `detect` and `scan` read.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sst_hotspot_core::eval::Truth;
use sst_hotspot_core::synth::SynthData;
use sst_hotspot_core::CountTensor;

use crate::error::{Error, Result};
use crate::report::{from_json, read_text, to_json, write_text};
use crate::schema::RecordSchema;

pub const KIND_TRUTH: &str = "truth";

/// Ground truth by label, so it survives reordering of categories.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthDocument {
    pub regions: Vec<String>,
    pub window: (String, String),
    pub center: String,
}

impl TruthDocument {
    pub fn from_truth(t: &Truth, regions: &[String], times: &[String]) -> Self {
        Self {
            regions: t.regions.iter().map(|&r| regions[r].clone()).collect(),
            window: (times[t.window.0].clone(), times[t.window.1].clone()),
            center: regions[t.center].clone(),
        }
    }

    /// Back to indices into `regions` and `times`.
    pub fn resolve(&self, regions: &[String], times: &[String]) -> Result<Truth> {
        let find = |list: &[String], v: &str, what: &str| {
            list.iter()
                .position(|x| x == v)
                .ok_or_else(|| Error::UnknownRegion {
                    context: format!("truth {what}"),
                    region: v.to_string(),
                })
        };
        Ok(Truth {
            regions: self
                .regions
                .iter()
                .map(|r| find(regions, r, "region"))
                .collect::<Result<_>>()?,
            window: (
                find(times, &self.window.0, "window")?,
                find(times, &self.window.1, "window")?,
            ),
            center: find(regions, &self.center, "center")?,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        from_json(KIND_TRUTH, &read_text(path)?)
    }
}

/// Paths of the files written by [`write_synth`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthFiles {
    pub population: PathBuf,
    pub cases: PathBuf,
    pub adjacency: PathBuf,
    pub centroids: PathBuf,
    pub schema: PathBuf,
    pub truth: PathBuf,
}

impl SynthFiles {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            population: dir.join("population.csv"),
            cases: dir.join("cases.csv"),
            adjacency: dir.join("adjacency.csv"),
            centroids: dir.join("centroids.csv"),
            schema: dir.join("schema.json"),
            truth: dir.join("truth.json"),
        }
    }
}

fn labels(t: &CountTensor, mode: usize) -> &[String] {
    &t.modes()[mode].categories
}

fn tensor_csv(t: &CountTensor) -> String {
    let dims = t.dims();
    let mut out = String::from("region,time");
    if dims.len() > 2 {
        out.push_str(",group");
    }
    out.push_str(",count\n");
    for (off, v) in t.values().iter().enumerate() {
        let s = off % dims[0];
        let tt = (off / dims[0]) % dims[1];
        write!(out, "{},{}", labels(t, 0)[s], labels(t, 1)[tt]).unwrap();
        if dims.len() > 2 {
            write!(out, ",{}", labels(t, 2)[off / (dims[0] * dims[1])]).unwrap();
        }
        writeln!(out, ",{v}").unwrap();
    }
    out
}

/// Schema matching the files: region and time columns with their category
/// lists declared, so reading them back keeps the order.
pub fn synth_schema(data: &SynthData) -> RecordSchema {
    let p = &data.population;
    let mut schema = RecordSchema::new("region", "time").with_count("count");
    schema.categories.insert("region".into(), labels(p, 0).to_vec());
    schema.categories.insert("time".into(), labels(p, 1).to_vec());
    if p.order() > 2 {
        schema = schema.with_bundle("group", &["group"]);
        schema.categories.insert("group".into(), labels(p, 2).to_vec());
    }
    schema
}

pub fn write_synth(data: &SynthData, dir: &Path) -> Result<SynthFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = SynthFiles::in_dir(dir);
    let regions = labels(&data.population, 0);
    let times = labels(&data.population, 1);

    write_text(&files.population, &tensor_csv(&data.population))?;
    write_text(&files.cases, &tensor_csv(&data.cases))?;

    let mut adj = String::from("region_a,region_b\n");
    for a in 0..data.neighbors.len() {
        for b in data.neighbors.neighbors(a).filter(|&b| b > a) {
            writeln!(adj, "{},{}", regions[a], regions[b]).unwrap();
        }
    }
    write_text(&files.adjacency, &adj)?;

    let mut xy = String::from("region,x,y\n");
    for (r, (x, y)) in regions.iter().zip(&data.coords) {
        writeln!(xy, "{r},{x},{y}").unwrap();
    }
    write_text(&files.centroids, &xy)?;

    let mut schema = serde_json::to_string_pretty(&synth_schema(data))?;
    schema.push('\n');
    write_text(&files.schema, &schema)?;
    write_text(
        &files.truth,
        &to_json(KIND_TRUTH, &TruthDocument::from_truth(&data.truth, regions, times))?,
    )?;
    Ok(files)
}
