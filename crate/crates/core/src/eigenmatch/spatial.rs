//! Threshold partitioning of the spatial difference vector and cluster growth
//! over the neighbor graph.

use alloc::vec::Vec;

use super::{Axis, DiffVector, LikelyThreshold, DEFAULT_ZERO_TOL};
use crate::math;
use crate::neighbors::NeighborMatrix;

/// Region lists derived from `DS`. Every list is ordered by descending `DS`
/// (ties by region index).
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpatialPartition {
    /// Regions with `DS > 0`.
    pub sl: Vec<usize>,
    /// Hotspot centers, `DS > std(DS)`.
    pub sc: Vec<usize>,
    /// `SL` without the centers.
    pub st: Vec<usize>,
    /// Members of `ST` with `DS >= std(ST)`.
    pub s1: Vec<usize>,
    /// Members of `ST` with `DS < std(ST)`.
    pub s2: Vec<usize>,
    pub std_all: f64,
    pub std_st: f64,
    /// Threshold actually used for the likely cluster.
    pub likely_threshold: f64,
    pub likely_cluster: Vec<usize>,
}

/// Indices with `entries > zero_tol`, descending by value.
pub(crate) fn positive_desc(entries: &[f64], zero_tol: f64) -> Vec<usize> {
    let mut out: Vec<usize> = (0..entries.len()).filter(|&i| entries[i] > zero_tol).collect();
    out.sort_by(|&a, &b| entries[b].total_cmp(&entries[a]).then(a.cmp(&b)));
    out
}

pub fn partition_spatial(ds: &DiffVector, threshold: LikelyThreshold) -> SpatialPartition {
    partition_spatial_with(ds, threshold, DEFAULT_ZERO_TOL)
}

/// As [`partition_spatial`]; entries at or below `zero_tol` count as
/// non-positive.
pub fn partition_spatial_with(
    ds: &DiffVector,
    threshold: LikelyThreshold,
    zero_tol: f64,
) -> SpatialPartition {
    debug_assert_eq!(ds.axis, Axis::Space);
    let e = &ds.entries;
    let sl = positive_desc(e, zero_tol);
    let (sc, st): (Vec<usize>, Vec<usize>) = sl.iter().partition(|&&s| e[s] > ds.std_all);
    let st_values: Vec<f64> = st.iter().map(|&s| e[s]).collect();
    let std_st = math::population_std(&st_values);
    let (s1, s2): (Vec<usize>, Vec<usize>) = st.iter().partition(|&&s| e[s] >= std_st);
    let likely_threshold = match threshold {
        LikelyThreshold::StdSt => std_st,
        LikelyThreshold::StdDs => ds.std_all,
    };
    let likely_cluster = likely_cluster(&s1, e, likely_threshold);
    SpatialPartition {
        sl,
        sc,
        st,
        s1,
        s2,
        std_all: ds.std_all,
        std_st,
        likely_threshold,
        likely_cluster,
    }
}

/// Largest subset of `s1` (given in descending order) whose pairwise
/// `|DS(a) − DS(b)|` stays below `threshold`. Among equally large subsets the
/// one reaching the highest `DS` wins. Singletons are not reported.
fn likely_cluster(s1: &[usize], e: &[f64], threshold: f64) -> Vec<usize> {
    let mut best: (usize, usize) = (0, 0);
    for i in 0..s1.len() {
        let mut j = i;
        while j + 1 < s1.len() && e[s1[i]] - e[s1[j + 1]] < threshold {
            j += 1;
        }
        if j + 1 - i > best.1 - best.0 {
            best = (i, j + 1);
        }
    }
    if best.1 - best.0 < 2 {
        return Vec::new();
    }
    s1[best.0..best.1].to_vec()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ClusterKind {
    First,
    Second,
}

/// A hotspot center and the regions attached to it; `members[0]` is the
/// center, the rest follow in descending `DS`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cluster {
    pub center: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterSet {
    pub kind: ClusterKind,
    /// One per center, in the order of `SC`.
    pub clusters: Vec<Cluster>,
}

impl ClusterSet {
    pub fn cluster_of(&self, center: usize) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.center == center)
    }

    /// Union of all member regions, ascending.
    pub fn regions(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.clusters.iter().flat_map(|c| c.members.iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

/// Attaches every `S1` region to each center it borders. A region bordering
/// several centers joins all of their clusters.
pub fn grow_first_priority(part: &SpatialPartition, nb: &NeighborMatrix) -> ClusterSet {
    let clusters = part
        .sc
        .iter()
        .map(|&h| {
            let mut members = Vec::with_capacity(1 + part.s1.len());
            members.push(h);
            members.extend(part.s1.iter().copied().filter(|&x| nb.adjacent(x, h)));
            Cluster { center: h, members }
        })
        .collect();
    ClusterSet {
        kind: ClusterKind::First,
        clusters,
    }
}

/// Copies the first-priority clusters and attaches each `S2` region that
/// borders any first-priority member of a cluster. Regions reachable only
/// through another `S2` region are not attached.
pub fn grow_second_priority(
    first: &ClusterSet,
    part: &SpatialPartition,
    nb: &NeighborMatrix,
) -> ClusterSet {
    debug_assert_eq!(first.kind, ClusterKind::First);
    let clusters = first
        .clusters
        .iter()
        .map(|c| {
            let mut members = c.members.clone();
            for &x in &part.s2 {
                if c.members.iter().any(|&m| nb.adjacent(x, m)) && !members.contains(&x) {
                    members.push(x);
                }
            }
            Cluster {
                center: c.center,
                members,
            }
        })
        .collect();
    ClusterSet {
        kind: ClusterKind::Second,
        clusters,
    }
}
