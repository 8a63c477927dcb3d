//! Scan statistic over count tensors with replicas spread across threads.

use rayon::prelude::*;
use sst_hotspot_core::stscan::{
    attach_p_values, case_total, enumerate_cylinders, replica_max_score, scan, ScanResult,
    DEFAULT_MAX_FRACTION,
};
use sst_hotspot_core::{CountTensor, Matrix, NeighborMatrix};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub max_fraction: f64,
    pub elevated_only: bool,
    pub replications: usize,
    pub seed: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            max_fraction: DEFAULT_MAX_FRACTION,
            elevated_only: true,
            replications: 999,
            seed: crate::DEFAULT_SEED,
        }
    }
}

/// Null maxima for replicas `0..replications`, in replica order whatever the
/// thread count.
pub fn replica_maxima(
    baseline: &Matrix,
    cands: &sst_hotspot_core::CandidateSet,
    cases_total: u64,
    elevated_only: bool,
    seed: u64,
    replications: usize,
) -> Result<Vec<f64>> {
    (0..replications)
        .into_par_iter()
        .map(|i| replica_max_score(baseline, cands, cases_total, elevated_only, seed, i))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(Error::core("stscan"))
}

/// Marginalizes both tensors to space × time, enumerates cylinders (by
/// centroid distance when `coords` is given, else adjacency rings), scores
/// them and attaches Monte Carlo p-values unless `replications` is 0.
pub fn scan_tensors(
    population: &CountTensor,
    cases: &CountTensor,
    coords: Option<&[(f64, f64)]>,
    nb: Option<&NeighborMatrix>,
    opts: &ScanOptions,
) -> Result<ScanResult> {
    if !population.same_shape(cases) {
        return Err(Error::Core {
            module: "stscan",
            source: sst_hotspot_core::Error::ShapeMismatch(
                "population and case tensors differ in modes".into(),
            ),
        });
    }
    let baseline = population.space_time_marginal();
    let observed = cases.space_time_marginal();
    let weights: Vec<f64> = (0..baseline.rows()).map(|i| baseline.row(i).iter().sum()).collect();
    let cands = enumerate_cylinders(coords, nb, &weights, opts.max_fraction, baseline.cols())
        .map_err(Error::core("stscan"))?;
    let mut sr = scan(&observed, &baseline, &cands, opts.elevated_only)
        .map_err(Error::core("stscan"))?;
    if opts.replications > 0 {
        let total = case_total(sr.c_total).map_err(Error::core("stscan"))?;
        let maxima = replica_maxima(
            &baseline,
            &cands,
            total,
            opts.elevated_only,
            opts.seed,
            opts.replications,
        )?;
        attach_p_values(&mut sr, &maxima, opts.seed);
    }
    Ok(sr)
}
