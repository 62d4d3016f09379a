//! Gaussian elimination backends.
//!
//! Pivoting takes the first row (from the current rank downwards) with a
//! nonzero entry in the current column. Rows below the pivot are always
//! cleared; rows above are cleared too when the reduced form is requested.

use std::ops::{Add, Mul, Rem};

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::matrix::{Matrix, Store};
use crate::field::inv_mod;

/// Row echelon form together with the pivot columns.
#[derive(Debug, Clone)]
pub struct RowEchelon {
    /// Pivot column of each of the first `rank` rows, increasing.
    pub pivot_cols: Vec<usize>,
    /// The transformed matrix; its first `rank` rows carry the pivots and
    /// every pivot entry equals one.
    pub form: Matrix,
}

impl RowEchelon {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }
}

/// Eliminates `m`, looking for pivots only among the first `pivot_limit`
/// columns. Row operations still act on every column, which lets callers
/// track the transformation by augmenting with an identity block.
pub(crate) fn echelon(m: &Matrix, reduced: bool, pivot_limit: usize) -> RowEchelon {
    let mut form = m.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let limit = pivot_limit.min(cols);
    let pivot_cols = match &mut form.store {
        Store::Bits { words, data } => eliminate_bits(data, *words, rows, limit, reduced),
        Store::Residues(data) => {
            let p = m.field().characteristic().expect("prime field");
            if p < (1 << 16) {
                eliminate_prime::<u32>(data, p, rows, cols, limit, reduced)
            } else {
                eliminate_prime::<u64>(data, p, rows, cols, limit, reduced)
            }
        }
        Store::Rationals(data) => eliminate_rational(data, rows, cols, limit, reduced),
    };
    RowEchelon { pivot_cols, form }
}

pub(crate) fn rank(m: &Matrix) -> usize {
    echelon(m, false, m.cols()).rank()
}

fn eliminate_bits(
    data: &mut [u64],
    words: usize,
    rows: usize,
    limit: usize,
    reduced: bool,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..limit {
        if rank == rows {
            break;
        }
        let w = col / 64;
        let bit = 1u64 << (col % 64);
        let Some(piv) = (rank..rows).find(|&r| data[r * words + w] & bit != 0) else {
            continue;
        };
        if piv != rank {
            for k in 0..words {
                data.swap(piv * words + k, rank * words + k);
            }
        }
        let (head, tail) = data.split_at_mut(rank * words);
        let (pivot_row, tail) = tail.split_at_mut(words);
        let pivot_row = &pivot_row[w..];
        for row in tail.chunks_exact_mut(words) {
            if row[w] & bit != 0 {
                row[w..]
                    .iter_mut()
                    .zip(pivot_row)
                    .for_each(|(a, b)| *a ^= b);
            }
        }
        if reduced {
            for row in head.chunks_exact_mut(words) {
                if row[w] & bit != 0 {
                    row[w..]
                        .iter_mut()
                        .zip(pivot_row)
                        .for_each(|(a, b)| *a ^= b);
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}

/// Accumulator type for lazily reduced residues.
trait Lane:
    Copy + Default + PartialEq + Add<Output = Self> + Mul<Output = Self> + Rem<Output = Self>
{
    const MAX: u64;
    fn from_u64(v: u64) -> Self;
    fn to_u64(self) -> u64;
}

impl Lane for u32 {
    const MAX: u64 = u32::MAX as u64;
    fn from_u64(v: u64) -> Self {
        v as u32
    }
    fn to_u64(self) -> u64 {
        self as u64
    }
}

impl Lane for u64 {
    const MAX: u64 = u64::MAX;
    fn from_u64(v: u64) -> Self {
        v
    }
    fn to_u64(self) -> u64 {
        self
    }
}

/// Elimination over `F_p` with delayed reduction.
///
/// A row update adds `f * pivot` with `f, pivot < p`, so each update grows an
/// entry by at most `(p-1)^2`. A row is reduced after `budget` updates, which
/// keeps every entry below the lane's maximum. The pivot row itself is always
/// fully reduced and normalized to a leading one.
fn eliminate_prime<L: Lane>(
    data: &mut [u32],
    p: u32,
    rows: usize,
    cols: usize,
    limit: usize,
    reduced: bool,
) -> Vec<usize> {
    let pl = L::from_u64(p as u64);
    let pm1 = (p - 1) as u64;
    let budget = ((L::MAX - pm1) / (pm1 * pm1).max(1)).max(1);
    let mut buf: Vec<L> = data.iter().map(|&v| L::from_u64(v as u64)).collect();
    let mut pending = vec![0u64; rows];

    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..limit {
        if rank == rows {
            break;
        }
        let mut found = None;
        for r in rank..rows {
            let e = &mut buf[r * cols + col];
            *e = *e % pl;
            if e.to_u64() != 0 {
                found = Some(r);
                break;
            }
        }
        let Some(piv) = found else { continue };
        if piv != rank {
            for k in col..cols {
                buf.swap(piv * cols + k, rank * cols + k);
            }
            pending.swap(piv, rank);
        }
        // Normalize the pivot row.
        {
            let row = &mut buf[rank * cols + col..(rank + 1) * cols];
            let lead = (row[0] % pl).to_u64() as u32;
            let inv = inv_mod(lead, p) as u64;
            for e in row.iter_mut() {
                *e = L::from_u64((e.to_u64() % p as u64) * inv % p as u64);
            }
            pending[rank] = 0;
        }
        let pivot_row: Vec<L> = buf[rank * cols + col..(rank + 1) * cols].to_vec();
        let targets = if reduced { 0..rows } else { rank + 1..rows };
        for r in targets {
            if r == rank {
                continue;
            }
            let row = &mut buf[r * cols + col..(r + 1) * cols];
            let x = (row[0] % pl).to_u64();
            if x == 0 {
                row[0] = L::default();
                continue;
            }
            let f = L::from_u64(p as u64 - x);
            for (a, &b) in row.iter_mut().zip(&pivot_row) {
                *a = *a + f * b;
            }
            row[0] = L::default();
            pending[r] += 1;
            if pending[r] >= budget {
                row.iter_mut().for_each(|e| *e = *e % pl);
                pending[r] = 0;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    for (d, e) in data.iter_mut().zip(&buf) {
        *d = (e.to_u64() % p as u64) as u32;
    }
    pivots
}

fn eliminate_rational(
    data: &mut [BigRational],
    rows: usize,
    cols: usize,
    limit: usize,
    reduced: bool,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..limit {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| !data[r * cols + col].is_zero()) else {
            continue;
        };
        if piv != rank {
            for k in col..cols {
                data.swap(piv * cols + k, rank * cols + k);
            }
        }
        let inv = data[rank * cols + col].recip();
        for k in col..cols {
            let e = &mut data[rank * cols + k];
            if !e.is_zero() {
                *e = &*e * &inv;
            }
        }
        debug_assert!(data[rank * cols + col].is_one());
        let pivot_row: Vec<BigRational> = data[rank * cols + col..(rank + 1) * cols].to_vec();
        let targets = if reduced { 0..rows } else { rank + 1..rows };
        for r in targets {
            if r == rank || data[r * cols + col].is_zero() {
                continue;
            }
            let f = data[r * cols + col].clone();
            for (k, b) in pivot_row.iter().enumerate() {
                if !b.is_zero() {
                    let e = &mut data[r * cols + col + k];
                    *e = &*e - &f * b;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    pivots
}
