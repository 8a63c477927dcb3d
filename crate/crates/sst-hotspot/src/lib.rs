//! File formats, report serialization and the command-line front end for
//! [`sst_hotspot_core`].
//!
//! Inputs are CSV record files mapped onto tensor modes by a
//! [`schema::RecordSchema`], a region adjacency pair list and optional
//! centroids. Outputs are versioned JSON documents, GeoJSON maps and
//! comparison tables.

pub mod adjacency;
pub mod cli;
mod error;
pub mod geojson;
pub mod parallel;
pub mod records;
pub mod report;
pub mod schema;
pub mod synth_io;
pub mod table;

pub use error::{Error, Result, EXIT_NUMERICAL, EXIT_VALIDATION};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 7919;
