//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sst_hotspot_core::Matrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random::<f64>()).collect();
    Matrix::new(rows, cols, data).unwrap()
}

/// Dense symmetric eigendecomposition of `m·mᵀ` via nalgebra, eigenvalues
/// descending.
pub fn oracle_gram_eigen(m: &Matrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    let a = DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
    let g = &a * a.transpose();
    let eig = g.symmetric_eigen();
    let mut idx: Vec<usize> = (0..m.rows()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = idx
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (values, vectors)
}

/// `|dot(a, b)|`, i.e. agreement up to sign.
pub fn abs_cos(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().abs()
}

/// Direct log form of the scan likelihood ratio, written without sharing
/// any code with the library. Uses the same `ln` as the library so scores can
/// be compared bit for bit.
pub fn oracle_log_f(c: f64, b: f64, ct: f64, bt: f64, elevated_only: bool) -> f64 {
    if b >= bt {
        return 0.0;
    }
    if elevated_only && c / b <= ct / bt {
        return 0.0;
    }
    let inside = if c > 0.0 { c * libm::log(c / b) } else { 0.0 };
    let out_c = ct - c;
    let outside = if out_c > 0.0 {
        out_c * libm::log(out_c / (bt - b))
    } else {
        0.0
    };
    inside + outside
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCylinder {
    pub center: usize,
    pub members: Vec<usize>,
    pub window: (usize, usize),
    pub score: f64,
}

/// Every center, every radius taken from the sorted distance list, every
/// window; sums each cylinder cell by cell.
pub fn oracle_disks(
    coords: &[(f64, f64)],
    weights: &[f64],
    max_fraction: f64,
) -> Vec<(usize, Vec<usize>)> {
    let n = coords.len();
    let total: f64 = weights.iter().sum();
    let mut out = Vec::new();
    for c in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != c).collect();
        let d2 = |j: usize| {
            let dx = coords[j].0 - coords[c].0;
            let dy = coords[j].1 - coords[c].1;
            dx * dx + dy * dy
        };
        others.sort_by(|&a, &b| d2(a).partial_cmp(&d2(b)).unwrap().then(a.cmp(&b)));
        for k in 0..n {
            let mut members = vec![c];
            members.extend_from_slice(&others[..k]);
            let w: f64 = members.iter().map(|&m| weights[m]).sum();
            if k > 0 && w > max_fraction * total {
                break;
            }
            members.sort_unstable();
            out.push((c, members));
        }
    }
    out
}

pub fn oracle_scan(
    cases: &Matrix,
    baseline: &Matrix,
    disks: &[(usize, Vec<usize>)],
    elevated_only: bool,
) -> Vec<OracleCylinder> {
    let times = cases.cols();
    let ct: f64 = cases.as_slice().iter().sum();
    let bt: f64 = baseline.as_slice().iter().sum();
    let mut out = Vec::new();
    for (center, members) in disks {
        for t0 in 0..times {
            for t1 in t0..times {
                let mut c = 0.0;
                let mut b = 0.0;
                for &m in members {
                    for t in t0..=t1 {
                        c += cases.get(m, t);
                        b += baseline.get(m, t);
                    }
                }
                // whole-area cylinders and a zero case total carry no signal
                let score = if b >= bt || ct == 0.0 {
                    0.0
                } else {
                    oracle_log_f(c, b * (ct / bt), ct, ct, elevated_only)
                };
                out.push(OracleCylinder {
                    center: *center,
                    members: members.clone(),
                    window: (t0, t1),
                    score,
                });
            }
        }
    }
    out
}

/// Highest score, ties to fewer members, lower center, earlier window.
pub fn oracle_top(cyls: &[OracleCylinder]) -> OracleCylinder {
    let mut best = cyls[0].clone();
    for c in &cyls[1..] {
        let better = c.score > best.score
            || (c.score == best.score
                && (c.members.len(), c.center, c.window)
                    < (best.members.len(), best.center, best.window));
        if better {
            best = c.clone();
        }
    }
    best
}
