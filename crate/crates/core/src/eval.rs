//! Detection metrics and the side-by-side comparison of the eigenvector
//! detector with the scan statistic.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::eigenmatch::HotspotReport;
use crate::stscan::{ScanResult, ScoredCylinder};

/// Precision, recall and F1 in percent.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Metrics<T> {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub detected: Vec<T>,
    pub reference: Vec<T>,
    pub intersection: Vec<T>,
}

fn sorted_unique<T: Ord + Clone>(items: &[T]) -> Vec<T> {
    let mut v = items.to_vec();
    v.sort();
    v.dedup();
    v
}

/// Harmonic mean of two percentages; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

pub fn precision_recall_f1<T: Ord + Clone>(detected: &[T], reference: &[T]) -> Metrics<T> {
    let detected = sorted_unique(detected);
    let reference = sorted_unique(reference);
    let intersection: Vec<T> = detected
        .iter()
        .filter(|d| reference.binary_search(d).is_ok())
        .cloned()
        .collect();
    let hits = intersection.len() as f64;
    let precision = if detected.is_empty() {
        0.0
    } else {
        100.0 * hits / detected.len() as f64
    };
    let recall = if reference.is_empty() {
        0.0
    } else {
        100.0 * hits / reference.len() as f64
    };
    Metrics {
        precision,
        recall,
        f1: f1_score(precision, recall),
        detected,
        reference,
        intersection,
    }
}

/// Rounds a percentage to two decimals for tabular output.
pub fn round2(x: f64) -> f64 {
    libm::round(x * 100.0) / 100.0
}

/// Ground truth of an injected outbreak.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Truth {
    pub regions: Vec<usize>,
    pub window: (usize, usize),
    pub center: usize,
}

/// How detected clusters become a region set for scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Flatten {
    /// Union of all cluster members.
    #[default]
    Members,
    /// Cluster centers only.
    Centers,
}

/// Candidate tests the scan statistic needs when restricted to the detected
/// centers and intervals, versus every region as a center with every window.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pruning {
    pub full: usize,
    pub restricted: usize,
    pub fraction: f64,
}

pub fn pruning(n_regions: usize, n_times: usize, n_centers: usize, n_intervals: usize) -> Pruning {
    let full = n_regions * n_times * (n_times + 1) / 2;
    let restricted = n_centers * n_intervals;
    Pruning {
        full,
        restricted,
        fraction: if full == 0 {
            0.0
        } else {
            restricted as f64 / full as f64
        },
    }
}

/// Significant cylinders taken greedily in score order, skipping any that
/// share a region with one already taken.
pub fn non_overlapping(scan: &ScanResult, alpha: f64) -> Vec<&ScoredCylinder> {
    let mut taken: Vec<&ScoredCylinder> = Vec::new();
    for c in scan.significant(alpha) {
        if taken
            .iter()
            .all(|t| !t.members.iter().any(|m| c.members.contains(m)))
        {
            taken.push(c);
        }
    }
    taken
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonRow {
    pub method: String,
    pub level: String,
    pub metrics: Metrics<usize>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub pruning: Pruning,
}

/// Scores both detectors against `truth`. Scan rows come from the top
/// cylinder and, when p-values exist, from the non-overlapping significant
/// cylinders at `alpha`.
pub fn compare(
    sst: &HotspotReport,
    scan: &ScanResult,
    truth: &Truth,
    flatten: Flatten,
    alpha: f64,
) -> Comparison {
    let mut rows = Vec::new();
    let mut push = |method: &str, level: &str, detected: Vec<usize>| {
        rows.push(ComparisonRow {
            method: method.to_string(),
            level: level.to_string(),
            metrics: precision_recall_f1(&detected, &truth.regions),
        });
    };
    let levels = [("first", &sst.first), ("second", &sst.second)];
    for (name, set) in levels {
        let detected = match flatten {
            Flatten::Members => set.regions(),
            Flatten::Centers => sst.spatial.sc.clone(),
        };
        push("sst-hotspot", name, detected);
    }
    push("sst-hotspot", "likely", sst.spatial.likely_cluster.clone());

    let top = scan.top().map(|c| match flatten {
        Flatten::Members => c.members.clone(),
        Flatten::Centers => alloc::vec![c.center],
    });
    push("st-scan", "top", top.unwrap_or_default());
    if scan.replications > 0 {
        let detected = non_overlapping(scan, alpha)
            .into_iter()
            .flat_map(|c| match flatten {
                Flatten::Members => c.members.clone(),
                Flatten::Centers => alloc::vec![c.center],
            })
            .collect();
        push("st-scan", "significant", detected);
    }

    let pruning = pruning(
        sst.region_labels.len(),
        sst.time_labels.len(),
        sst.spatial.sc.len(),
        sst.intervals.len(),
    );
    Comparison { rows, pruning }
}
