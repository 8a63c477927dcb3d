use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Symmetric boolean region adjacency with an empty diagonal. Region order
/// follows the space mode of the tensors it is used with.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NeighborMatrix {
    n: usize,
    adjacency: Vec<bool>,
}

impl NeighborMatrix {
    /// No region touches any other.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adjacency: vec![false; n * n],
        }
    }

    /// Symmetric closure of an undirected pair list.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut m = Self::empty(n);
        for &(a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::InvalidNeighbors(format!(
                    "pair ({a}, {b}) out of range for {n} regions"
                )));
            }
            if a == b {
                return Err(Error::InvalidNeighbors(format!("self pair ({a}, {a})")));
            }
            m.adjacency[a * n + b] = true;
            m.adjacency[b * n + a] = true;
        }
        Ok(m)
    }

    /// Row-major `n × n` boolean matrix; must already be symmetric with a
    /// false diagonal.
    pub fn from_matrix(n: usize, adjacency: Vec<bool>) -> Result<Self> {
        if adjacency.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                found: adjacency.len(),
            });
        }
        for i in 0..n {
            if adjacency[i * n + i] {
                return Err(Error::InvalidNeighbors(format!("region {i} adjacent to itself")));
            }
            for j in 0..i {
                if adjacency[i * n + j] != adjacency[j * n + i] {
                    return Err(Error::InvalidNeighbors(format!(
                        "asymmetric entry ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n, adjacency })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a * self.n + b]
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&b| self.adjacent(a, b))
    }

    pub fn degree(&self, a: usize) -> usize {
        self.neighbors(a).count()
    }

    /// Number of true cells (each undirected edge counts twice).
    pub fn true_cells(&self) -> usize {
        self.adjacency.iter().filter(|b| **b).count()
    }

    /// Relabels regions: new region `i` is old region `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut adjacency = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                adjacency[i * n + j] = self.adjacent(perm[i], perm[j]);
            }
        }
        Self { n, adjacency }
    }

    /// Whether `set` induces a connected subgraph. The empty set is not.
    pub fn is_connected(&self, set: &[usize]) -> bool {
        let Some(&start) = set.first() else {
            return false;
        };
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        let mut reached = 1;
        while let Some(a) = stack.pop() {
            for &b in set {
                if !seen[b] && self.adjacent(a, b) {
                    seen[b] = true;
                    reached += 1;
                    stack.push(b);
                }
            }
        }
        reached == set.len()
    }
}
