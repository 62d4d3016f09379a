//! Frozen variables and linear relations.
//!
//! A set `I` of columns is a *relation* of `A` if some nonzero vector of the
//! row space of `A` has its support inside `I`. A column `i` is *frozen* when
//! `{i}` is a relation, equivalently when every kernel vector vanishes at
//! `i`. A relation `I` is *proper* when `I` minus the frozen columns is still
//! a relation.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::matrix::{IndexSet, Matrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrozenMethod {
    /// `rank(A) - rank(A⟨;i⟩) = 1`, one elimination per column.
    RankDrop,
    /// Columns outside the union of kernel-basis supports, one elimination.
    KernelSupport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrozenReport {
    pub frozen: IndexSet,
    pub method: FrozenMethod,
}

impl Matrix {
    /// The frozen columns, `F(A)`.
    pub fn frozen_set(&self, method: FrozenMethod) -> FrozenReport {
        let frozen = match method {
            FrozenMethod::RankDrop => {
                let r = self.rank();
                (0..self.cols())
                    .filter(|&i| self.remove_col(i).expect("in range").rank() + 1 == r)
                    .collect()
            }
            FrozenMethod::KernelSupport => {
                // In reduced echelon form the kernel basis vector of a free
                // column f touches f and every pivot column whose row has a
                // nonzero at f. The untouched columns are exactly the pivots
                // whose reduced row is a unit vector.
                let ech = self.rref();
                ech.pivot_cols
                    .iter()
                    .enumerate()
                    .filter(|&(r, _)| ech.form.row_nnz(r) == 1)
                    .map(|(_, &c)| c)
                    .collect()
            }
        };
        FrozenReport { frozen, method }
    }

    /// `F(A)` by the default method.
    pub fn frozen(&self) -> IndexSet {
        self.frozen_set(FrozenMethod::KernelSupport).frozen
    }

    /// Whether `cols` is a relation: decided by comparing the rank of the
    /// matrix restricted to the complementary columns with the full rank.
    pub fn is_relation(&self, cols: &IndexSet) -> Result<bool> {
        if cols.is_empty() {
            return Err(Error::usage("a relation must be a nonempty column set"));
        }
        cols.check_bound(self.cols())?;
        Ok(self.remove(&IndexSet::empty(), cols)?.rank() < self.rank())
    }
}

/// Size guards for the exponential relation enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationCaps {
    pub max_cols: usize,
    pub max_rank: usize,
    /// Largest row space (number of vectors) enumerated explicitly; beyond
    /// this, and over the rationals, each candidate set is tested by rank.
    pub max_row_space: u64,
}

impl Default for RelationCaps {
    fn default() -> Self {
        RelationCaps {
            max_cols: 24,
            max_rank: 14,
            max_row_space: 1 << 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationMethod {
    /// Enumerate row space supports when small enough, else rank tests.
    Auto,
    Enumerate,
    RankTest,
}

fn row_space_size(a: &Matrix, rank: usize) -> Option<u64> {
    let q = a.field().order()?;
    q.checked_pow(rank as u32)
}

/// Supports (as bit masks) of all nonzero vectors in the row space.
fn row_space_supports(a: &Matrix) -> HashSet<u32> {
    let ech = a.rref();
    let rank = ech.rank();
    let n = a.cols();
    let q = a.field().order().expect("finite field") as u32;
    let basis: Vec<Vec<u32>> = (0..rank)
        .map(|r| {
            (0..n)
                .map(|j| ech.form.get(r, j).as_residue().expect("prime field"))
                .collect()
        })
        .collect();
    let mut supports = HashSet::new();
    let mut digits = vec![0u32; rank];
    let mut current = vec![0u32; n];
    // Odometer over coefficient vectors; bumping digit k by one adds
    // basis[k] once (a wrap from q-1 to 0 also adds it once).
    loop {
        let mut k = 0;
        loop {
            if k == rank {
                return supports;
            }
            for (c, b) in current.iter_mut().zip(&basis[k]) {
                *c = (*c + b) % q;
            }
            digits[k] = (digits[k] + 1) % q;
            if digits[k] != 0 {
                break;
            }
            k += 1;
        }
        let mask = current
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .fold(0u32, |m, (j, _)| m | (1 << j));
        supports.insert(mask);
    }
}

/// Calls `visit` with every `ell`-subset of `0..n`, in lexicographic order.
pub(crate) fn for_each_subset(n: usize, ell: usize, mut visit: impl FnMut(&[usize])) {
    if ell > n {
        return;
    }
    let mut idx: Vec<usize> = (0..ell).collect();
    loop {
        visit(&idx);
        let Some(pos) = (0..ell).rev().find(|&k| idx[k] != k + n - ell) else {
            return;
        };
        idx[pos] += 1;
        for k in pos + 1..ell {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

impl Matrix {
    /// All proper relations of size `ell`, with default caps.
    pub fn proper_relations(&self, ell: usize) -> Result<Vec<IndexSet>> {
        self.proper_relations_with(ell, RelationCaps::default(), RelationMethod::Auto)
    }

    pub fn proper_relations_with(
        &self,
        ell: usize,
        caps: RelationCaps,
        method: RelationMethod,
    ) -> Result<Vec<IndexSet>> {
        if ell < 2 {
            return Err(Error::usage(
                "proper relations are counted for sizes ell >= 2",
            ));
        }
        let n = self.cols();
        if n > caps.max_cols {
            return Err(Error::Resource {
                what: "column count",
                cap: caps.max_cols,
                got: n,
            });
        }
        let rank = self.rank();
        if rank > caps.max_rank {
            return Err(Error::Resource {
                what: "rank",
                cap: caps.max_rank,
                got: rank,
            });
        }
        let frozen = self.frozen();
        let frozen_mask = frozen.iter().fold(0u32, |m, j| m | (1 << j));
        let enumerable = row_space_size(self, rank).is_some_and(|s| s <= caps.max_row_space);
        let enumerate = match method {
            RelationMethod::Auto => enumerable,
            RelationMethod::Enumerate if !enumerable => {
                return Err(Error::Resource {
                    what: "row space size",
                    cap: caps.max_row_space as usize,
                    got: row_space_size(self, rank).map_or(usize::MAX, |s| s as usize),
                })
            }
            RelationMethod::Enumerate => true,
            RelationMethod::RankTest => false,
        };

        let mut out = Vec::new();
        if enumerate {
            let supports: Vec<u32> = minimal(row_space_supports(self));
            for_each_subset(n, ell, |idx| {
                let mask = idx.iter().fold(0u32, |m, &j| m | (1 << j));
                let rest = mask & !frozen_mask;
                if rest != 0 && supports.iter().any(|&s| s & !rest == 0) {
                    out.push(idx.iter().copied().collect());
                }
            });
        } else {
            let mut err = None;
            for_each_subset(n, ell, |idx| {
                if err.is_some() {
                    return;
                }
                let rest: IndexSet = idx
                    .iter()
                    .copied()
                    .filter(|&j| !frozen.contains(j))
                    .collect();
                if rest.is_empty() {
                    return;
                }
                match self.is_relation(&rest) {
                    Ok(true) => out.push(idx.iter().copied().collect()),
                    Ok(false) => {}
                    Err(e) => err = Some(e),
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        Ok(out)
    }

    /// At most `delta * n^ell` proper relations of size `ell`.
    pub fn is_delta_ell_free(&self, delta: f64, ell: usize) -> Result<bool> {
        let count = self.proper_relations(ell)?.len();
        Ok(count as f64 <= delta * (self.cols() as f64).powi(ell as i32))
    }
}

/// Drops every support that strictly contains another.
fn minimal(supports: HashSet<u32>) -> Vec<u32> {
    let mut v: Vec<u32> = supports.into_iter().collect();
    v.sort_by_key(|s| s.count_ones());
    let mut keep: Vec<u32> = Vec::new();
    for s in v {
        if !keep.iter().any(|&k| k & !s == 0) {
            keep.push(s);
        }
    }
    keep
}
