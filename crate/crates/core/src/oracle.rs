//! Brute-force references over small prime fields.
//!
//! Everything here enumerates vectors explicitly and shares no code with the
//! elimination backends, so tests can use it as an independent check. Only
//! prime fields are supported.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::exactla::{IndexSet, Matrix};

/// Largest number of vectors an oracle call may enumerate.
pub const ENUMERATION_CAP: u64 = 1 << 22;

fn residues(a: &Matrix) -> Result<(u32, Vec<Vec<u32>>)> {
    let q = a
        .field()
        .order()
        .ok_or_else(|| Error::usage("oracles need a finite field"))?;
    let rows = (0..a.rows())
        .map(|i| {
            (0..a.cols())
                .map(|j| a.get(i, j).as_residue().expect("prime field"))
                .collect()
        })
        .collect();
    Ok((q as u32, rows))
}

fn count_check(q: u32, len: usize) -> Result<u64> {
    match (q as u64).checked_pow(len as u32) {
        Some(c) if c <= ENUMERATION_CAP => Ok(c),
        _ => Err(Error::Resource {
            what: "oracle enumeration",
            cap: ENUMERATION_CAP as usize,
            got: usize::MAX,
        }),
    }
}

/// Every vector of `F_q^len`, visited by counting in base `q`.
fn for_each_vector(q: u32, len: usize, mut visit: impl FnMut(&[u32])) -> Result<()> {
    let total = count_check(q, len)?;
    let mut v = vec![0u32; len];
    for _ in 0..total {
        visit(&v);
        for digit in v.iter_mut() {
            *digit += 1;
            if *digit < q {
                break;
            }
            *digit = 0;
        }
    }
    Ok(())
}

/// All distinct vectors `yA` for `y ∈ F^m`.
pub fn row_space(a: &Matrix) -> Result<HashSet<Vec<u32>>> {
    let (q, rows) = residues(a)?;
    let mut out = HashSet::new();
    for_each_vector(q, a.rows(), |y| {
        let mut v = vec![0u32; a.cols()];
        for (coef, row) in y.iter().zip(&rows) {
            if *coef != 0 {
                for (acc, e) in v.iter_mut().zip(row) {
                    *acc = ((*acc as u64 + *coef as u64 * *e as u64) % q as u64) as u32;
                }
            }
        }
        out.insert(v);
    })?;
    Ok(out)
}

/// Rank as `log_q` of the row-space size.
pub fn rank(a: &Matrix) -> Result<usize> {
    let q = a
        .field()
        .order()
        .ok_or_else(|| Error::usage("oracles need a finite field"))?;
    let mut size = row_space(a)?.len() as u64;
    let mut r = 0;
    while size > 1 {
        debug_assert_eq!(size % q, 0);
        size /= q;
        r += 1;
    }
    Ok(r)
}

/// All `x` with `A x = 0`.
pub fn kernel(a: &Matrix) -> Result<Vec<Vec<u32>>> {
    let (q, rows) = residues(a)?;
    let mut out = Vec::new();
    for_each_vector(q, a.cols(), |x| {
        let zero = rows.iter().all(|row| {
            row.iter().zip(x).fold(0u64, |acc, (e, xi)| {
                (acc + *e as u64 * *xi as u64) % q as u64
            }) == 0
        });
        if zero {
            out.push(x.to_vec());
        }
    })?;
    Ok(out)
}

/// Columns on which every kernel vector vanishes.
pub fn frozen(a: &Matrix) -> Result<IndexSet> {
    let ker = kernel(a)?;
    Ok((0..a.cols())
        .filter(|&i| ker.iter().all(|x| x[i] == 0))
        .collect())
}

/// Whether some nonzero row-space vector has its support inside `cols`.
pub fn is_relation(a: &Matrix, cols: &IndexSet) -> Result<bool> {
    Ok(row_space(a)?.iter().any(|v| {
        v.iter().any(|&e| e != 0)
            && v.iter()
                .enumerate()
                .all(|(j, &e)| e == 0 || cols.contains(j))
    }))
}

/// Proper relations of size `ell`, straight from the definitions.
pub fn proper_relations(a: &Matrix, ell: usize) -> Result<Vec<IndexSet>> {
    let space = row_space(a)?;
    let frozen = frozen(a)?;
    let supports: Vec<Vec<usize>> = space
        .iter()
        .filter(|v| v.iter().any(|&e| e != 0))
        .map(|v| (0..v.len()).filter(|&j| v[j] != 0).collect())
        .collect();
    let n = a.cols();
    let mut out = Vec::new();
    if ell > n {
        return Ok(out);
    }
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as usize != ell {
            continue;
        }
        let inside = |j: usize| mask >> j & 1 == 1 && !frozen.contains(j);
        if supports.iter().any(|s| s.iter().all(|&j| inside(j))) {
            out.push((0..n).filter(|&j| mask >> j & 1 == 1).collect());
        }
    }
    out.sort_by(|x: &IndexSet, y| x.as_slice().cmp(y.as_slice()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn p3() -> Matrix {
        Matrix::from_integers(3, 3, FieldSpec::F2, &[0, 1, 0, 1, 0, 1, 0, 1, 0]).unwrap()
    }

    #[test]
    fn path_by_hand() {
        let a = p3();
        assert_eq!(row_space(&a).unwrap().len(), 4);
        assert_eq!(rank(&a).unwrap(), 2);
        assert_eq!(kernel(&a).unwrap().len(), 2);
        assert_eq!(frozen(&a).unwrap(), IndexSet::from([1]));
        assert!(is_relation(&a, &IndexSet::from([0, 2])).unwrap());
        assert!(!is_relation(&a, &IndexSet::from([0])).unwrap());
        let rel = proper_relations(&a, 2).unwrap();
        assert_eq!(rel, vec![IndexSet::from([0, 2])]);
    }

    #[test]
    fn rejects_rationals_and_huge_spaces() {
        assert!(rank(&Matrix::zeros(1, 1, FieldSpec::Q)).is_err());
        let big = Matrix::zeros(30, 2, FieldSpec::F2);
        assert!(matches!(rank(&big), Err(Error::Resource { .. })));
    }
}
