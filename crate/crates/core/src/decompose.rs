//! Per-mode Gram-matrix eigendecomposition of count tensors.
//!
//! Each mode is unfolded to a matrix `M`, the Gram matrix `M·Mᵀ` is formed and
//! its leading eigenpairs are kept. This yields the mode factors of a
//! higher-order SVD without any iterative tensor fitting.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::math;
use crate::tensor::{CountTensor, ModeKind};

/// Relative residual tolerance for returned eigenpairs.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Upper bound on Jacobi sweeps.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Leading eigenpairs of a symmetric positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpairs {
    /// Descending, clamped at zero.
    pub values: Vec<f64>,
    /// Unit norm, canonical sign (largest-magnitude element positive).
    pub vectors: Vec<Vec<f64>>,
}

/// Top-`r` eigenpairs of the symmetric PSD matrix `g`.
///
/// Every returned pair satisfies `‖g·v − λ·v‖ ≤ tol · ‖g‖_F`, otherwise a
/// [`Error::NonConvergence`] carrying the worst relative residual is returned.
pub fn symmetric_top_eigen(g: &Matrix, r: usize, tol: f64, max_iter: usize) -> Result<Eigenpairs> {
    let n = g.rows();
    if r > n {
        return Err(Error::RankExceedsDim {
            mode: 0,
            rank: r,
            dim: n,
        });
    }
    let full = symmetric_eigen(g, max_iter)?;
    let norm = g.frobenius_norm();
    let mut values = Vec::with_capacity(r);
    let mut vectors = Vec::with_capacity(r);
    let mut worst = 0.0f64;
    for (lambda, mut v) in full.values.into_iter().zip(full.vectors).take(r) {
        let gv = g.mul_vec(&v);
        let res = math::sqrt(
            gv.iter()
                .zip(&v)
                .map(|(a, b)| (a - lambda * b) * (a - lambda * b))
                .sum(),
        );
        worst = worst.max(if norm > 0.0 { res / norm } else { res });
        math::canonicalize(&mut v);
        values.push(lambda.max(0.0));
        vectors.push(v);
    }
    if worst > tol {
        return Err(Error::NonConvergence {
            iterations: full.sweeps,
            residual: worst,
        });
    }
    Ok(Eigenpairs { values, vectors })
}

/// Top-`r` eigenpairs of `m·mᵀ`.
pub fn gram_eigen(m: &Matrix, r: usize, tol: f64, max_iter: usize) -> Result<Eigenpairs> {
    symmetric_top_eigen(&m.gram(), r, tol, max_iter)
}

/// Retained eigenstructure of one mode.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeFactors {
    pub kind: ModeKind,
    pub name: String,
    pub rank: usize,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    /// Trace of the Gram matrix, i.e. the sum of all its eigenvalues.
    pub trace: f64,
    /// Retained eigenvalue mass over `trace`.
    pub fit: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EigenModel {
    pub modes: Vec<ModeFactors>,
}

impl EigenModel {
    pub fn ranks(&self) -> Vec<usize> {
        self.modes.iter().map(|m| m.rank).collect()
    }

    pub fn fits(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.fit).collect()
    }

    /// Worst per-mode fit.
    pub fn fit(&self) -> f64 {
        self.modes.iter().map(|m| m.fit).fold(1.0, f64::min)
    }

    /// Leading eigenvector of mode `mode`.
    pub fn leading(&self, mode: usize) -> &[f64] {
        &self.modes[mode].eigenvectors[0]
    }
}

/// 2 for the space and time modes, 1 elsewhere, never above the mode's dim.
pub fn default_ranks(t: &CountTensor) -> Vec<usize> {
    t.modes()
        .iter()
        .map(|m| {
            let r = match m.kind {
                ModeKind::Space | ModeKind::Time => 2,
                ModeKind::Attribute => 1,
            };
            r.min(m.dim())
        })
        .collect()
}

pub fn decompose(t: &CountTensor, ranks: &[usize]) -> Result<EigenModel> {
    decompose_with(t, ranks, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

pub fn decompose_with(
    t: &CountTensor,
    ranks: &[usize],
    tol: f64,
    max_iter: usize,
) -> Result<EigenModel> {
    if ranks.len() != t.order() {
        return Err(Error::LengthMismatch {
            expected: t.order(),
            found: ranks.len(),
        });
    }
    let mut modes = Vec::with_capacity(t.order());
    for (k, (mode, &rank)) in t.modes().iter().zip(ranks).enumerate() {
        if rank == 0 {
            return Err(Error::ZeroRank { mode: k });
        }
        if rank > mode.dim() {
            return Err(Error::RankExceedsDim {
                mode: k,
                rank,
                dim: mode.dim(),
            });
        }
        let g = t.unfold(k)?.gram();
        let trace = g.trace();
        if trace <= 0.0 {
            return Err(Error::DegenerateMode {
                mode: k,
                label: mode.name.clone(),
            });
        }
        let pairs = symmetric_top_eigen(&g, rank, tol, max_iter)?;
        let fit = (pairs.values.iter().sum::<f64>() / trace).clamp(0.0, 1.0);
        modes.push(ModeFactors {
            kind: mode.kind,
            name: mode.name.clone(),
            rank,
            eigenvalues: pairs.values,
            eigenvectors: pairs.vectors,
            trace,
            fit,
        });
    }
    Ok(EigenModel { modes })
}
