//! Eigenvector-element matching between a population model and a case model.
//!
//! Both tensors are decomposed mode by mode; the leading space and time
//! eigenvectors are sign-aligned and subtracted element-wise
//! (`DS(s) = ESp(s) − ESc(s)`, `DT(t) = ETp(t) − ETc(t)`). Regions and times
//! whose difference exceeds the population standard deviation of the whole
//! difference vector become hotspot centers; weaker positive deviations are
//! attached to centers through the neighbor graph (space) or turned into
//! intervals (time).

mod spatial;
mod temporal;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use spatial::{
    grow_first_priority, grow_second_priority, partition_spatial, partition_spatial_with, Cluster,
    ClusterKind, ClusterSet, SpatialPartition,
};
pub use temporal::{
    partition_temporal, partition_temporal_with, temporal_intervals, Interval, TemporalPartition,
    TemporalResult,
};

use crate::decompose::{decompose_with, default_ranks, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::math;
use crate::neighbors::NeighborMatrix;
use crate::tensor::CountTensor;

/// Differences at or below this are treated as zero when partitioning, so
/// that rounding noise between two proportional models never produces
/// hotspots.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Axis {
    Space,
    Time,
}

/// Threshold separating the likely cluster from the rest of `S1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LikelyThreshold {
    /// Population std of the `ST` values.
    #[default]
    StdSt,
    /// Population std of the full `DS` vector.
    StdDs,
}

/// Common direction given to each sign-aligned eigenvector pair before
/// subtraction.
///
/// Leading eigenvectors of non-negative tensors have entries of one sign.
/// With `CaseExcess` the pair points in the negative direction, so that
/// `ESp − ESc` is positive where cases exceed what the population predicts.
/// `Canonical` keeps the largest-magnitude element positive, which turns the
/// same subtraction into a case-deficit indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Orientation {
    #[default]
    CaseExcess,
    Canonical,
}

/// Returns `e_ref` in canonical sign and `e_other` flipped, if needed, so that
/// the two have a non-negative dot product. An orthogonal `e_other` is
/// canonicalized on its own.
pub fn sign_correct(e_ref: &[f64], e_other: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if e_ref.len() != e_other.len() {
        return Err(Error::LengthMismatch {
            expected: e_ref.len(),
            found: e_other.len(),
        });
    }
    if math::norm(e_ref) == 0.0 || math::norm(e_other) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut r = e_ref.to_vec();
    math::canonicalize(&mut r);
    let mut o = e_other.to_vec();
    let d = math::dot(&r, &o);
    if d < 0.0 {
        o.iter_mut().for_each(|x| *x = -*x);
    } else if d == 0.0 {
        math::canonicalize(&mut o);
    }
    Ok((r, o))
}

/// Per-category signed differences along one axis.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiffVector {
    pub axis: Axis,
    pub entries: Vec<f64>,
    /// Population standard deviation of `entries`.
    pub std_all: f64,
}

impl DiffVector {
    pub fn new(axis: Axis, entries: Vec<f64>) -> Self {
        let std_all = math::population_std(&entries);
        Self {
            axis,
            entries,
            std_all,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// `e_p[i] − e_c[i]` for every element.
pub fn element_diff(e_p: &[f64], e_c: &[f64], axis: Axis) -> Result<DiffVector> {
    if e_p.len() != e_c.len() {
        return Err(Error::LengthMismatch {
            expected: e_p.len(),
            found: e_c.len(),
        });
    }
    Ok(DiffVector::new(
        axis,
        e_p.iter().zip(e_c).map(|(p, c)| p - c).collect(),
    ))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SstConfig {
    /// Per-mode ranks; `None` uses 2 for space and time and 1 elsewhere.
    pub ranks: Option<Vec<usize>>,
    pub likely_threshold: LikelyThreshold,
    pub orientation: Orientation,
    pub zero_tol: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SstConfig {
    fn default() -> Self {
        Self {
            ranks: None,
            likely_threshold: LikelyThreshold::default(),
            orientation: Orientation::default(),
            zero_tol: DEFAULT_ZERO_TOL,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

/// Everything one detection run produced, including the intermediate
/// eigenvectors and difference vectors.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HotspotReport {
    pub ranks: Vec<usize>,
    pub order: usize,
    pub likely_threshold: LikelyThreshold,
    pub orientation: Orientation,
    pub region_labels: Vec<String>,
    pub time_labels: Vec<String>,
    pub population_fits: Vec<f64>,
    pub cases_fits: Vec<f64>,
    pub es_p: Vec<f64>,
    pub es_c: Vec<f64>,
    pub et_p: Vec<f64>,
    pub et_c: Vec<f64>,
    pub ds: DiffVector,
    pub dt: DiffVector,
    pub spatial: SpatialPartition,
    pub first: ClusterSet,
    pub second: ClusterSet,
    pub temporal: TemporalPartition,
    pub intervals: TemporalResult,
}

impl HotspotReport {
    pub fn region(&self, i: usize) -> &str {
        &self.region_labels[i]
    }

    pub fn time(&self, t: usize) -> &str {
        &self.time_labels[t]
    }

    pub fn center_labels(&self) -> Vec<&str> {
        self.spatial.sc.iter().map(|&i| self.region(i)).collect()
    }

    pub fn temporal_center_labels(&self) -> Vec<&str> {
        self.temporal.tc.iter().map(|&t| self.time(t)).collect()
    }
}

fn oriented_pair(
    p: &[f64],
    c: &[f64],
    orientation: Orientation,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (mut p, mut c) = sign_correct(p, c)?;
    if orientation == Orientation::CaseExcess {
        p.iter_mut().chain(c.iter_mut()).for_each(|x| *x = -*x);
    }
    Ok((p, c))
}

/// Full detection pipeline over a population tensor `p` and a case tensor
/// `c` with identical modes.
pub fn run_sst_hotspot(
    p: &CountTensor,
    c: &CountTensor,
    nb: &NeighborMatrix,
    cfg: &SstConfig,
) -> Result<HotspotReport> {
    if !p.same_shape(c) {
        return Err(Error::ShapeMismatch(
            "population and case tensors differ in modes or categories".into(),
        ));
    }
    let s = p.space_mode();
    let t = p.time_mode();
    let n_regions = p.modes()[s].dim();
    if nb.len() != n_regions {
        return Err(Error::ShapeMismatch(format!(
            "neighbor matrix has {} regions, space mode has {n_regions}",
            nb.len()
        )));
    }
    let ranks = cfg.ranks.clone().unwrap_or_else(|| default_ranks(p));
    let pm = decompose_with(p, &ranks, cfg.tol, cfg.max_iter)?;
    let cm = decompose_with(c, &ranks, cfg.tol, cfg.max_iter)?;

    let (es_p, es_c) = oriented_pair(pm.leading(s), cm.leading(s), cfg.orientation)?;
    let (et_p, et_c) = oriented_pair(pm.leading(t), cm.leading(t), cfg.orientation)?;
    let ds = element_diff(&es_p, &es_c, Axis::Space)?;
    let dt = element_diff(&et_p, &et_c, Axis::Time)?;

    let spatial = partition_spatial_with(&ds, cfg.likely_threshold, cfg.zero_tol);
    let first = grow_first_priority(&spatial, nb);
    let second = grow_second_priority(&first, &spatial, nb);
    let temporal = partition_temporal_with(&dt, cfg.zero_tol);
    let intervals = temporal_intervals(&temporal.tc, &temporal.t1);

    Ok(HotspotReport {
        ranks,
        order: p.order(),
        likely_threshold: cfg.likely_threshold,
        orientation: cfg.orientation,
        region_labels: p.modes()[s].categories.clone(),
        time_labels: p.modes()[t].categories.clone(),
        population_fits: pm.fits(),
        cases_fits: cm.fits(),
        es_p,
        es_c,
        et_p,
        et_c,
        ds,
        dt,
        spatial,
        first,
        second,
        temporal,
        intervals,
    })
}
