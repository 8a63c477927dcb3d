//! Dense count tensors with labeled modes.
//!
//! Values are linearized with the **first mode varying fastest**: the cell at
//! multi-index `(i0, i1, .., ik)` lives at
//! `i0 + d0 * (i1 + d1 * (i2 + ..))`.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ModeKind {
    Space,
    Time,
    Attribute,
}

/// One axis of a tensor and the ordered category names along it.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mode {
    pub kind: ModeKind,
    pub name: String,
    pub categories: Vec<String>,
}

impl Mode {
    pub fn new(kind: ModeKind, name: impl Into<String>, categories: Vec<String>) -> Self {
        Self {
            kind,
            name: name.into(),
            categories,
        }
    }

    /// Mode whose categories are `"0"`, `"1"`, ...
    pub fn indexed(kind: ModeKind, name: impl Into<String>, dim: usize) -> Self {
        Self::new(kind, name, (0..dim).map(|i| format!("{i}")).collect())
    }

    pub fn dim(&self) -> usize {
        self.categories.len()
    }
}

/// Dense, non-negative count array. Exactly one mode is spatial and exactly
/// one is temporal; any others are attribute modes.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CountTensor {
    modes: Vec<Mode>,
    values: Vec<f64>,
}

impl CountTensor {
    pub fn new(modes: Vec<Mode>, values: Vec<f64>) -> Result<Self> {
        let spaces = modes.iter().filter(|m| m.kind == ModeKind::Space).count();
        let times = modes.iter().filter(|m| m.kind == ModeKind::Time).count();
        if spaces != 1 || times != 1 {
            return Err(Error::InvalidTensor(format!(
                "need exactly one space and one time mode, found {spaces} and {times}"
            )));
        }
        if let Some(m) = modes.iter().find(|m| m.categories.is_empty()) {
            return Err(Error::InvalidTensor(format!("mode '{}' has no categories", m.name)));
        }
        let len: usize = modes.iter().map(Mode::dim).product();
        if values.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidTensor(format!(
                "values must be finite and non-negative, found {v}"
            )));
        }
        Ok(Self { modes, values })
    }

    pub fn zeros(modes: Vec<Mode>) -> Result<Self> {
        let len = modes.iter().map(Mode::dim).product();
        Self::new(modes, vec![0.0; len])
    }

    /// Builds a tensor by evaluating `f` at every multi-index.
    pub fn from_fn(modes: Vec<Mode>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let dims: Vec<usize> = modes.iter().map(Mode::dim).collect();
        let len = dims.iter().product();
        let mut values = Vec::with_capacity(len);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..len {
            values.push(f(&idx));
            for (k, d) in dims.iter().enumerate() {
                idx[k] += 1;
                if idx[k] < *d {
                    break;
                }
                idx[k] = 0;
            }
        }
        Self::new(modes, values)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn dims(&self) -> Vec<usize> {
        self.modes.iter().map(Mode::dim).collect()
    }

    pub fn order(&self) -> usize {
        self.modes.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn space_mode(&self) -> usize {
        self.modes.iter().position(|m| m.kind == ModeKind::Space).unwrap()
    }

    pub fn time_mode(&self) -> usize {
        self.modes.iter().position(|m| m.kind == ModeKind::Time).unwrap()
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.modes.len());
        let mut off = 0;
        let mut stride = 1;
        for (i, m) in index.iter().zip(&self.modes) {
            off += i * stride;
            stride *= m.dim();
        }
        off
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.values[self.offset(index)]
    }

    /// Adds `amount` to one cell. Fails on a negative result.
    pub fn add(&mut self, index: &[usize], amount: f64) -> Result<()> {
        let off = self.offset(index);
        let v = self.values[off] + amount;
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidTensor(format!("cell would become {v}")));
        }
        self.values[off] = v;
        Ok(())
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.modes.clone(), self.values.iter().map(|v| v * c).collect())
    }

    /// Same labels and dims as `other`.
    pub fn same_shape(&self, other: &CountTensor) -> bool {
        self.modes == other.modes
    }

    /// Mode-`mode` unfolding: row `i` collects every entry whose index along
    /// `mode` is `i`. Columns enumerate the remaining modes in their original
    /// order, earliest remaining mode fastest.
    pub fn unfold(&self, mode: usize) -> Result<Matrix> {
        let order = self.modes.len();
        if mode >= order {
            return Err(Error::ModeOutOfRange { mode, order });
        }
        let dims = self.dims();
        let rows = dims[mode];
        let cols = self.values.len() / rows;
        let mut out = Matrix::zeros(rows, cols);
        let mut idx = vec![0usize; order];
        for &v in &self.values {
            let mut col = 0;
            let mut stride = 1;
            for k in 0..order {
                if k != mode {
                    col += idx[k] * stride;
                    stride *= dims[k];
                }
            }
            out.set(idx[mode], col, v);
            for (k, d) in dims.iter().enumerate() {
                idx[k] += 1;
                if idx[k] < *d {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(out)
    }

    /// Sums out every attribute mode, leaving a space × time matrix.
    pub fn space_time_marginal(&self) -> Matrix {
        let s = self.space_mode();
        let t = self.time_mode();
        let dims = self.dims();
        let mut out = Matrix::zeros(dims[s], dims[t]);
        let mut idx = vec![0usize; dims.len()];
        for &v in &self.values {
            let (i, j) = (idx[s], idx[t]);
            out.set(i, j, out.get(i, j) + v);
            for (k, d) in dims.iter().enumerate() {
                idx[k] += 1;
                if idx[k] < *d {
                    break;
                }
                idx[k] = 0;
            }
        }
        out
    }
}
