//! Temporal centers and hotspot intervals.

use alloc::vec::Vec;

use super::spatial::positive_desc;
use super::{Axis, DiffVector, DEFAULT_ZERO_TOL};
use crate::math;

/// Time lists derived from `DT`, each in descending `DT` order. There is no
/// second-stage list below `T1`.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TemporalPartition {
    pub tl: Vec<usize>,
    pub tc: Vec<usize>,
    pub tt: Vec<usize>,
    pub t1: Vec<usize>,
    pub std_all: f64,
    pub std_tt: f64,
}

pub fn partition_temporal(dt: &DiffVector) -> TemporalPartition {
    partition_temporal_with(dt, DEFAULT_ZERO_TOL)
}

pub fn partition_temporal_with(dt: &DiffVector, zero_tol: f64) -> TemporalPartition {
    debug_assert_eq!(dt.axis, Axis::Time);
    let e = &dt.entries;
    let tl = positive_desc(e, zero_tol);
    let (tc, tt): (Vec<usize>, Vec<usize>) = tl.iter().partition(|&&t| e[t] > dt.std_all);
    let tt_values: Vec<f64> = tt.iter().map(|&t| e[t]).collect();
    let std_tt = math::population_std(&tt_values);
    let t1 = tt.iter().copied().filter(|&t| e[t] >= std_tt).collect();
    TemporalPartition {
        tl,
        tc,
        tt,
        t1,
        std_all: dt.std_all,
        std_tt,
    }
}

/// Closed interval of time indices, `start <= end`.
pub type Interval = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TemporalResult {
    /// One interval per unordered pair of temporal centers.
    pub t_first: Vec<Interval>,
    /// One interval per (first-priority time, center) pair.
    pub t_second: Vec<Interval>,
}

impl TemporalResult {
    pub fn len(&self) -> usize {
        self.t_first.len() + self.t_second.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Intervals between every pair of centers, and between each first-priority
/// time and each center. Time indices are assumed chronological. Both lists
/// come back sorted.
pub fn temporal_intervals(tc: &[usize], t1: &[usize]) -> TemporalResult {
    let mut t_first = Vec::new();
    for (i, &a) in tc.iter().enumerate() {
        for &b in &tc[i + 1..] {
            if a != b {
                t_first.push((a.min(b), a.max(b)));
            }
        }
    }
    t_first.sort_unstable();
    t_first.dedup();
    let mut t_second: Vec<Interval> = t1
        .iter()
        .flat_map(|&x| tc.iter().map(move |&h| (x.min(h), x.max(h))))
        .collect();
    t_second.sort_unstable();
    TemporalResult { t_first, t_second }
}
