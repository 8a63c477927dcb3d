//! Space-time scan statistic: cylinder enumeration, likelihood-ratio scoring
//! and Monte Carlo significance.
//!
//! Scores are kept in log form,
//! `log F = C·ln(C/B) + (Ct − C)·ln((Ct − C)/(Bt − B))`, with `0·ln(0/y) = 0`.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::neighbors::NeighborMatrix;

pub const DEFAULT_MAX_FRACTION: f64 = 0.5;
pub const DEFAULT_ALPHA: f64 = 0.05;

#[inline]
fn xlnxy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * math::ln(x / y)
    }
}

/// Log likelihood-ratio score of a cylinder with `c` cases against baseline
/// `b`, out of `c_total` cases and `b_total` baseline overall.
///
/// With `elevated_only`, cylinders whose inside rate does not exceed the
/// overall rate score 0.
pub fn score(c: f64, b: f64, c_total: f64, b_total: f64, elevated_only: bool) -> Result<f64> {
    if c < 0.0 || c > c_total {
        return Err(Error::InvalidScan(format!(
            "count {c} outside [0, {c_total}]"
        )));
    }
    if b <= 0.0 && c > 0.0 {
        return Err(Error::InfiniteRate { count: c });
    }
    if b >= b_total {
        return Err(Error::DegenerateCylinder {
            baseline: b,
            total: b_total,
        });
    }
    if elevated_only && c * b_total <= c_total * b {
        return Ok(0.0);
    }
    Ok(xlnxy(c, b) + xlnxy(c_total - c, b_total - b))
}

/// Scoring inside the scan loop. The baseline is rescaled to expected counts
/// (`B · Ct / Bt`) so both totals agree; whole-area cylinders score 0.
#[inline]
fn cylinder_score(c: f64, b: f64, c_total: f64, b_total: f64, elevated_only: bool) -> f64 {
    if b >= b_total || c_total == 0.0 {
        return 0.0;
    }
    score(c, expected(b, c_total, b_total), c_total, c_total, elevated_only).unwrap_or(0.0)
}

#[inline]
fn expected(b: f64, c_total: f64, b_total: f64) -> f64 {
    b * (c_total / b_total)
}

/// A center region and the regions within some radius of it, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Disk {
    pub center: usize,
    pub members: Vec<usize>,
}

/// A disk crossed with the inclusive time window `window`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cylinder {
    pub center: usize,
    pub members: Vec<usize>,
    pub window: (usize, usize),
}

/// Every disk crossed with every contiguous time window.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub n_regions: usize,
    pub times: usize,
    pub disks: Vec<Disk>,
}

impl CandidateSet {
    pub fn windows(&self) -> usize {
        self.times * (self.times + 1) / 2
    }

    pub fn len(&self) -> usize {
        self.disks.len() * self.windows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Cylinder> + '_ {
        let times = self.times;
        self.disks.iter().flat_map(move |d| {
            (0..times).flat_map(move |t0| {
                (t0..times).map(move |t1| Cylinder {
                    center: d.center,
                    members: d.members.clone(),
                    window: (t0, t1),
                })
            })
        })
    }
}

/// Builds nested disks around every region and crosses them with all time
/// windows.
///
/// With coordinates, regions join a center's disk one at a time by Euclidean
/// distance (ties by index). Without, whole breadth-first adjacency rings join
/// at once. A disk whose share of `region_weights` exceeds `max_fraction` is
/// dropped, except the center on its own.
pub fn enumerate_cylinders(
    coords: Option<&[(f64, f64)]>,
    nb: Option<&NeighborMatrix>,
    region_weights: &[f64],
    max_fraction: f64,
    times: usize,
) -> Result<CandidateSet> {
    if !(max_fraction > 0.0 && max_fraction <= 1.0) {
        return Err(Error::InvalidScan(format!(
            "max_fraction must lie in (0, 1], got {max_fraction}"
        )));
    }
    let n = region_weights.len();
    let total: f64 = region_weights.iter().sum();
    if region_weights.iter().any(|w| !w.is_finite() || *w < 0.0) || total <= 0.0 {
        return Err(Error::InvalidScan(
            "region weights must be non-negative with a positive total".into(),
        ));
    }
    let limit = max_fraction * total;
    let mut disks = Vec::new();
    match (coords, nb) {
        (Some(xy), _) => {
            if xy.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: xy.len(),
                });
            }
            for c in 0..n {
                let mut order: Vec<(f64, usize)> = (0..n)
                    .filter(|&j| j != c)
                    .map(|j| {
                        let dx = xy[j].0 - xy[c].0;
                        let dy = xy[j].1 - xy[c].1;
                        (dx * dx + dy * dy, j)
                    })
                    .collect();
                order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let mut members = vec![c];
                let mut weight = region_weights[c];
                disks.push(disk(c, &members));
                for (_, j) in order {
                    weight += region_weights[j];
                    if weight > limit {
                        break;
                    }
                    members.push(j);
                    disks.push(disk(c, &members));
                }
            }
        }
        (None, Some(nb)) => {
            if nb.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: nb.len(),
                });
            }
            for c in 0..n {
                let mut members = vec![c];
                disks.push(disk(c, &members));
                let mut weight = region_weights[c];
                for ring in bfs_rings(nb, c) {
                    weight += ring.iter().map(|&j| region_weights[j]).sum::<f64>();
                    if weight > limit {
                        break;
                    }
                    members.extend(ring);
                    disks.push(disk(c, &members));
                }
            }
        }
        (None, None) => {
            return Err(Error::InvalidScan(
                "cylinder enumeration needs coordinates or an adjacency matrix".into(),
            ))
        }
    }
    Ok(CandidateSet {
        n_regions: n,
        times,
        disks,
    })
}

fn disk(center: usize, members: &[usize]) -> Disk {
    let mut m = members.to_vec();
    m.sort_unstable();
    Disk { center, members: m }
}

/// Graph-distance rings around `c`, excluding `c`; each ring ascending.
fn bfs_rings(nb: &NeighborMatrix, c: usize) -> Vec<Vec<usize>> {
    let mut dist = vec![usize::MAX; nb.len()];
    dist[c] = 0;
    let mut queue = VecDeque::from([c]);
    let mut rings: Vec<Vec<usize>> = Vec::new();
    while let Some(a) = queue.pop_front() {
        for b in nb.neighbors(a) {
            if dist[b] == usize::MAX {
                dist[b] = dist[a] + 1;
                if rings.len() < dist[b] {
                    rings.push(Vec::new());
                }
                rings[dist[b] - 1].push(b);
                queue.push_back(b);
            }
        }
    }
    rings.iter_mut().for_each(|r| r.sort_unstable());
    rings
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoredCylinder {
    pub center: usize,
    pub members: Vec<usize>,
    pub window: (usize, usize),
    pub cases: f64,
    /// Expected cases under the null.
    pub baseline: f64,
    pub score: f64,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanResult {
    /// Descending score; ties go to fewer members, then the lower center,
    /// then the earlier window.
    pub cylinders: Vec<ScoredCylinder>,
    pub c_total: f64,
    pub b_total: f64,
    pub elevated_only: bool,
    pub replications: usize,
    pub seed: Option<u64>,
}

impl ScanResult {
    pub fn top(&self) -> Option<&ScoredCylinder> {
        self.cylinders.first()
    }

    /// Cylinders with a p-value at or below `alpha`, in score order.
    pub fn significant(&self, alpha: f64) -> impl Iterator<Item = &ScoredCylinder> {
        self.cylinders
            .iter()
            .filter(move |c| c.p_value.is_some_and(|p| p <= alpha))
    }
}

fn validate(cases: &Matrix, baseline: &Matrix, cands: &CandidateSet) -> Result<(f64, f64)> {
    if cases.rows() != baseline.rows() || cases.cols() != baseline.cols() {
        return Err(Error::ShapeMismatch(format!(
            "cases are {}x{}, baseline is {}x{}",
            cases.rows(),
            cases.cols(),
            baseline.rows(),
            baseline.cols()
        )));
    }
    if cases.rows() != cands.n_regions || cases.cols() != cands.times {
        return Err(Error::ShapeMismatch(format!(
            "candidates cover {} regions x {} times, data is {}x{}",
            cands.n_regions,
            cands.times,
            cases.rows(),
            cases.cols()
        )));
    }
    for r in 0..cases.rows() {
        for t in 0..cases.cols() {
            let (c, b) = (cases.get(r, t), baseline.get(r, t));
            if !(c.is_finite() && b.is_finite()) || c < 0.0 || b < 0.0 {
                return Err(Error::InvalidScan(format!(
                    "cell ({r}, {t}) must be finite and non-negative"
                )));
            }
            if b == 0.0 && c > 0.0 {
                return Err(Error::InvalidScan(format!(
                    "cell ({r}, {t}) has {c} cases against a zero baseline"
                )));
            }
        }
    }
    let b_total: f64 = baseline.as_slice().iter().sum();
    if b_total <= 0.0 {
        return Err(Error::InvalidScan("total baseline must be positive".into()));
    }
    Ok((cases.as_slice().iter().sum(), b_total))
}

/// Walks every cylinder, handing `(disk, window, C, B)` to `visit`.
/// Window sums accumulate left to right over the per-time disk totals.
fn for_each_cylinder(
    cases: &Matrix,
    baseline: &Matrix,
    cands: &CandidateSet,
    mut visit: impl FnMut(&Disk, (usize, usize), f64, f64),
) {
    let times = cands.times;
    let mut cs = vec![0.0; times];
    let mut bs = vec![0.0; times];
    for d in &cands.disks {
        cs.iter_mut().for_each(|x| *x = 0.0);
        bs.iter_mut().for_each(|x| *x = 0.0);
        for &m in &d.members {
            for t in 0..times {
                cs[t] += cases.get(m, t);
                bs[t] += baseline.get(m, t);
            }
        }
        for t0 in 0..times {
            let (mut c, mut b) = (0.0, 0.0);
            for t1 in t0..times {
                c += cs[t1];
                b += bs[t1];
                visit(d, (t0, t1), c, b);
            }
        }
    }
}

/// Scores every candidate cylinder and ranks them. `baseline` only matters
/// up to scale: population at risk and expected counts give the same result.
pub fn scan(
    cases: &Matrix,
    baseline: &Matrix,
    cands: &CandidateSet,
    elevated_only: bool,
) -> Result<ScanResult> {
    let (c_total, b_total) = validate(cases, baseline, cands)?;
    let mut cylinders = Vec::with_capacity(cands.len());
    for_each_cylinder(cases, baseline, cands, |d, window, c, b| {
        cylinders.push(ScoredCylinder {
            center: d.center,
            members: d.members.clone(),
            window,
            cases: c,
            baseline: expected(b, c_total, b_total),
            score: cylinder_score(c, b, c_total, b_total, elevated_only),
            p_value: None,
        });
    });
    cylinders.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.members.len().cmp(&b.members.len()))
            .then(a.center.cmp(&b.center))
            .then(a.window.cmp(&b.window))
    });
    Ok(ScanResult {
        cylinders,
        c_total,
        b_total,
        elevated_only,
        replications: 0,
        seed: None,
    })
}

/// Highest cylinder score over the candidate set.
pub fn max_score(
    cases: &Matrix,
    baseline: &Matrix,
    cands: &CandidateSet,
    elevated_only: bool,
) -> Result<f64> {
    let (c_total, b_total) = validate(cases, baseline, cands)?;
    let mut best = f64::NEG_INFINITY;
    for_each_cylinder(cases, baseline, cands, |_, _, c, b| {
        best = best.max(cylinder_score(c, b, c_total, b_total, elevated_only));
    });
    Ok(best)
}

/// Random number stream for replica `index`; independent of evaluation order.
pub fn replica_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Spreads `total` cases over all cells with probabilities proportional to
/// `baseline`, by a chain of conditional binomial draws in cell order.
pub fn multinomial_cases(baseline: &Matrix, total: u64, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let cells = baseline.as_slice();
    let mut mass: f64 = cells.iter().sum();
    if !(mass > 0.0) {
        return Err(Error::InvalidScan("total baseline must be positive".into()));
    }
    let mut remaining = total;
    let mut out = Vec::with_capacity(cells.len());
    let last_positive = cells.iter().rposition(|b| *b > 0.0).unwrap_or(0);
    for (i, &b) in cells.iter().enumerate() {
        let k = if remaining == 0 || b <= 0.0 {
            0
        } else if i == last_positive {
            remaining
        } else {
            let p = (b / mass).clamp(0.0, 1.0);
            Binomial::new(remaining, p)
                .map_err(|e| Error::InvalidScan(format!("binomial draw: {e}")))?
                .sample(rng)
        };
        remaining -= k;
        mass -= b;
        out.push(k as f64);
    }
    Matrix::new(baseline.rows(), baseline.cols(), out)
}

/// Whole-number case total, as required by the randomization null.
pub fn case_total(c_total: f64) -> Result<u64> {
    let r = libm::round(c_total);
    if !(c_total >= 0.0) || (c_total - r).abs() > 1e-9 {
        return Err(Error::InvalidScan(format!(
            "case total {c_total} is not a whole number"
        )));
    }
    Ok(r as u64)
}

/// Maximum cylinder score of replica `index` under the null.
pub fn replica_max_score(
    baseline: &Matrix,
    cands: &CandidateSet,
    cases_total: u64,
    elevated_only: bool,
    seed: u64,
    index: usize,
) -> Result<f64> {
    let mut rng = replica_rng(seed, index);
    let sim = multinomial_cases(baseline, cases_total, &mut rng)?;
    max_score(&sim, baseline, cands, elevated_only)
}

/// Fills in `p = (1 + #{replica maxima ≥ score}) / (R + 1)` for every
/// cylinder.
pub fn attach_p_values(sr: &mut ScanResult, replica_maxima: &[f64], seed: u64) {
    let mut sorted = replica_maxima.to_vec();
    sorted.sort_by(f64::total_cmp);
    let r = sorted.len();
    for cyl in &mut sr.cylinders {
        let below = sorted.partition_point(|m| *m < cyl.score);
        cyl.p_value = Some((1 + r - below) as f64 / (r + 1) as f64);
    }
    sr.replications = r;
    sr.seed = Some(seed);
}

/// Randomization test: `replications` null replicas, each keeping the case
/// total fixed. Replica `i` draws from its own stream, so results do not
/// depend on evaluation order.
pub fn monte_carlo_p(
    mut sr: ScanResult,
    baseline: &Matrix,
    cands: &CandidateSet,
    replications: usize,
    seed: u64,
) -> Result<ScanResult> {
    if replications == 0 {
        return Err(Error::InvalidScan("replications must be at least 1".into()));
    }
    let total = case_total(sr.c_total)?;
    let maxima = (0..replications)
        .map(|i| replica_max_score(baseline, cands, total, sr.elevated_only, seed, i))
        .collect::<Result<Vec<f64>>>()?;
    attach_p_values(&mut sr, &maxima, seed);
    Ok(sr)
}
