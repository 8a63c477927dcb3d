//! Spatiotemporal hotspot detection on count tensors.
//!
//! Two detectors share one data model:
//!
//! * [`eigenmatch::run_sst_hotspot`] decomposes a population tensor and a case
//!   tensor mode by mode, matches the leading space and time eigenvectors
//!   element by element and grows hotspot clusters over a region adjacency
//!   graph.
//! * [`stscan`] is the space-time scan statistic over cylinders (a spatial
//!   disk crossed with a time window) with Monte Carlo p-values.
//!
//! [`eval`] scores either against ground truth and [`synth`] produces
//! outbreaks with known location. The crate is `no_std` and only needs
//! `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod decompose;
pub mod eigenmatch;
mod error;
pub mod eval;
pub mod linalg;
pub mod math;
pub mod neighbors;
pub mod stscan;
pub mod synth;
pub mod tensor;

pub use decompose::{decompose, default_ranks, gram_eigen, EigenModel, Eigenpairs, ModeFactors};
pub use eigenmatch::{run_sst_hotspot, HotspotReport, LikelyThreshold, Orientation, SstConfig};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use neighbors::NeighborMatrix;
pub use stscan::{CandidateSet, ScanResult};
pub use tensor::{CountTensor, Mode, ModeKind};
