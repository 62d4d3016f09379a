use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{sample_nonzero, FieldElement, FieldKind, FieldSpec};

/// Sorted, duplicate-free set of zero-based indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Fails unless every index is below `bound`.
    pub fn check_bound(&self, bound: usize) -> Result<()> {
        match self.0.last() {
            Some(&i) if i >= bound => Err(Error::usage(format!(
                "index {i} out of range for dimension {bound}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn difference(&self, other: &IndexSet) -> IndexSet {
        IndexSet(self.iter().filter(|&i| !other.contains(i)).collect())
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.iter().all(|i| other.contains(i))
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }
}

impl<const N: usize> From<[usize; N]> for IndexSet {
    fn from(a: [usize; N]) -> Self {
        a.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Store {
    /// `F_2`, row-major, `words` machine words per row; padding bits are zero.
    Bits {
        words: usize,
        data: Vec<u64>,
    },
    /// Canonical residues, row-major.
    Residues(Vec<u32>),
    Rationals(Vec<BigRational>),
}

pub(crate) fn words_for(cols: usize) -> usize {
    cols.div_ceil(64)
}

/// Dense matrix over a [`FieldSpec`]. Matrices over `F_2` are bit-packed.
///
/// Indices are zero-based throughout.
#[derive(Debug, Clone)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    pub(crate) store: Store,
    symmetric: bool,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.field == other.field
            && self.store == other.store
    }
}

impl Eq for Matrix {}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, field: FieldSpec) -> Self {
        let store = match field.kind() {
            FieldKind::Prime(2) => {
                let words = words_for(cols);
                Store::Bits {
                    words,
                    data: vec![0; rows * words],
                }
            }
            FieldKind::Prime(_) => Store::Residues(vec![0; rows * cols]),
            FieldKind::Rationals => Store::Rationals(vec![BigRational::zero(); rows * cols]),
        };
        Matrix {
            rows,
            cols,
            field,
            store,
            symmetric: false,
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Matrix::zeros(n, n, field);
        for i in 0..n {
            m.set_one(i, i);
        }
        m.symmetric = true;
        m
    }

    /// Builds a matrix from a generator of entries.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        field: FieldSpec,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Result<Self> {
        let mut m = Matrix::zeros(rows, cols, field);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, &f(i, j))?;
            }
        }
        Ok(m)
    }

    /// Row-major integer entries, reduced into `field`.
    pub fn from_integers(
        rows: usize,
        cols: usize,
        field: FieldSpec,
        values: &[i64],
    ) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::usage(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                values.len()
            )));
        }
        Matrix::from_fn(rows, cols, field, |i, j| {
            field.from_i64(values[i * cols + j])
        })
    }

    pub fn from_rows(field: FieldSpec, rows: &[Vec<FieldElement>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::usage("rows of unequal length"));
        }
        Matrix::from_fn(rows.len(), cols, field, |i, j| rows[i][j].clone())
    }

    /// Each entry independently nonzero with probability `density`, then a
    /// uniform nonzero element.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        rows: usize,
        cols: usize,
        field: FieldSpec,
        density: f64,
    ) -> Matrix {
        let mut m = Matrix::zeros(rows, cols, field);
        for i in 0..rows {
            for j in 0..cols {
                if rng.random_bool(density.clamp(0.0, 1.0)) {
                    m.set(i, j, &sample_nonzero(rng, field))
                        .expect("same field");
                }
            }
        }
        m
    }

    /// Symmetric with zero diagonal, off-diagonal pairs as in [`Matrix::random`].
    pub fn random_symmetric<R: Rng + ?Sized>(
        rng: &mut R,
        n: usize,
        field: FieldSpec,
        density: f64,
    ) -> Matrix {
        let mut m = Matrix::zeros(n, n, field);
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(density.clamp(0.0, 1.0)) {
                    let w = sample_nonzero(rng, field);
                    m.set(i, j, &w).expect("same field");
                    m.set(j, i, &w).expect("same field");
                }
            }
        }
        m.symmetric = true;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Whether the matrix was built (or verified) as symmetric.
    pub fn symmetric_flag(&self) -> bool {
        self.symmetric
    }

    /// Verifies symmetry and sets the flag.
    pub fn into_symmetric(mut self) -> Result<Self> {
        if !self.is_symmetric() {
            return Err(Error::usage("matrix is not symmetric"));
        }
        self.symmetric = true;
        Ok(self)
    }

    pub(crate) fn assume_symmetric(mut self) -> Self {
        debug_assert!(self.is_symmetric());
        self.symmetric = true;
        self
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.entry_eq(i, j, j, i)))
    }

    fn entry_eq(&self, i: usize, j: usize, k: usize, l: usize) -> bool {
        match &self.store {
            Store::Bits { .. } => self.is_nonzero(i, j) == self.is_nonzero(k, l),
            Store::Residues(d) => d[i * self.cols + j] == d[k * self.cols + l],
            Store::Rationals(d) => d[i * self.cols + j] == d[k * self.cols + l],
        }
    }

    fn check_index(&self, i: usize, j: usize) {
        assert!(
            i < self.rows && j < self.cols,
            "entry ({i},{j}) out of range for a {}x{} matrix",
            self.rows,
            self.cols
        );
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.check_index(i, j);
        match &self.store {
            Store::Bits { words, data } => self
                .field
                .residue(((data[i * words + j / 64] >> (j % 64)) & 1) as u32),
            Store::Residues(d) => self.field.residue(d[i * self.cols + j]),
            Store::Rationals(d) => self
                .field
                .from_rational(&d[i * self.cols + j])
                .expect("rational field accepts every rational"),
        }
    }

    pub fn is_nonzero(&self, i: usize, j: usize) -> bool {
        self.check_index(i, j);
        match &self.store {
            Store::Bits { words, data } => (data[i * words + j / 64] >> (j % 64)) & 1 == 1,
            Store::Residues(d) => d[i * self.cols + j] != 0,
            Store::Rationals(d) => !d[i * self.cols + j].is_zero(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: &FieldElement) -> Result<()> {
        if value.spec() != self.field {
            return Err(Error::usage(format!(
                "cannot store an element of {} in a matrix over {}",
                value.spec(),
                self.field
            )));
        }
        self.check_index(i, j);
        self.symmetric = false;
        let cols = self.cols;
        match &mut self.store {
            Store::Bits { words, data } => {
                let w = &mut data[i * *words + j / 64];
                let bit = 1u64 << (j % 64);
                if value.is_zero() {
                    *w &= !bit;
                } else {
                    *w |= bit;
                }
            }
            Store::Residues(d) => d[i * cols + j] = value.as_residue().expect("prime field"),
            Store::Rationals(d) => {
                d[i * cols + j] = value.as_rational().expect("rationals").clone()
            }
        }
        Ok(())
    }

    pub(crate) fn set_one(&mut self, i: usize, j: usize) {
        let one = self.field.one();
        self.set(i, j, &one).expect("same field");
    }

    pub fn row(&self, i: usize) -> Vec<FieldElement> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    /// Column indices of the nonzero entries of row `i`.
    pub fn row_support(&self, i: usize) -> IndexSet {
        (0..self.cols).filter(|&j| self.is_nonzero(i, j)).collect()
    }

    /// Number of nonzero entries in row `i`.
    pub fn row_nnz(&self, i: usize) -> usize {
        match &self.store {
            Store::Bits { words, data } => data[i * words..(i + 1) * words]
                .iter()
                .map(|w| w.count_ones() as usize)
                .sum(),
            Store::Residues(d) => d[i * self.cols..(i + 1) * self.cols]
                .iter()
                .filter(|&&v| v != 0)
                .count(),
            Store::Rationals(d) => d[i * self.cols..(i + 1) * self.cols]
                .iter()
                .filter(|v| !v.is_zero())
                .count(),
        }
    }

    /// Number of nonzero entries of row `i` within columns `lo..hi`.
    pub fn row_nnz_in(&self, i: usize, lo: usize, hi: usize) -> usize {
        match &self.store {
            Store::Bits { words, data } => {
                let row = &data[i * words..(i + 1) * words];
                (lo..hi)
                    .filter(|&j| (row[j / 64] >> (j % 64)) & 1 == 1)
                    .count()
            }
            _ => (lo..hi).filter(|&j| self.is_nonzero(i, j)).count(),
        }
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        match &self.store {
            Store::Bits { data, .. } => data.iter().map(|w| w.count_ones() as usize).sum(),
            Store::Residues(d) => d.iter().filter(|&&v| v != 0).count(),
            Store::Rationals(d) => d.iter().filter(|v| !v.is_zero()).count(),
        }
    }

    /// Builds a matrix whose entry `(i, j)` is entry `(row_of(i), col_of(j))`
    /// of `self`.
    pub(crate) fn gather(&self, row_idx: &[usize], col_idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(row_idx.len(), col_idx.len(), self.field);
        let (src_cols, dst_cols) = (self.cols, out.cols);
        match (&self.store, &mut out.store) {
            (
                Store::Bits {
                    words: sw,
                    data: sd,
                },
                Store::Bits {
                    words: dw,
                    data: dd,
                },
            ) => {
                for (i, &r) in row_idx.iter().enumerate() {
                    for (j, &c) in col_idx.iter().enumerate() {
                        if (sd[r * sw + c / 64] >> (c % 64)) & 1 == 1 {
                            dd[i * *dw + j / 64] |= 1 << (j % 64);
                        }
                    }
                }
            }
            (Store::Residues(s), Store::Residues(d)) => {
                for (i, &r) in row_idx.iter().enumerate() {
                    for (j, &c) in col_idx.iter().enumerate() {
                        d[i * dst_cols + j] = s[r * src_cols + c];
                    }
                }
            }
            (Store::Rationals(s), Store::Rationals(d)) => {
                for (i, &r) in row_idx.iter().enumerate() {
                    for (j, &c) in col_idx.iter().enumerate() {
                        d[i * dst_cols + j] = s[r * src_cols + c].clone();
                    }
                }
            }
            _ => unreachable!("stores share a field"),
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows, self.field);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.is_nonzero(i, j) {
                    t.copy_entry_from(j, i, self, i, j);
                }
            }
        }
        t.symmetric = self.symmetric;
        t
    }

    fn copy_entry_from(&mut self, i: usize, j: usize, src: &Matrix, k: usize, l: usize) {
        let cols = self.cols;
        match (&mut self.store, &src.store) {
            (Store::Bits { words, data }, Store::Bits { .. }) => {
                let bit = 1u64 << (j % 64);
                if src.is_nonzero(k, l) {
                    data[i * *words + j / 64] |= bit;
                } else {
                    data[i * *words + j / 64] &= !bit;
                }
            }
            (Store::Residues(d), Store::Residues(s)) => d[i * cols + j] = s[k * src.cols + l],
            (Store::Rationals(d), Store::Rationals(s)) => {
                d[i * cols + j] = s[k * src.cols + l].clone()
            }
            _ => unreachable!("stores share a field"),
        }
    }

    /// `A⟨rows; cols⟩`: deletes the listed rows and columns, keeping the
    /// remaining entries in order.
    pub fn remove(&self, rows: &IndexSet, cols: &IndexSet) -> Result<Matrix> {
        rows.check_bound(self.rows)?;
        cols.check_bound(self.cols)?;
        let keep_r: Vec<usize> = (0..self.rows).filter(|&i| !rows.contains(i)).collect();
        let keep_c: Vec<usize> = (0..self.cols).filter(|&j| !cols.contains(j)).collect();
        let mut out = self.gather(&keep_r, &keep_c);
        out.symmetric = self.symmetric && rows == cols;
        Ok(out)
    }

    pub fn remove_row(&self, i: usize) -> Result<Matrix> {
        self.remove(&IndexSet::from([i]), &IndexSet::empty())
    }

    pub fn remove_col(&self, j: usize) -> Result<Matrix> {
        self.remove(&IndexSet::empty(), &IndexSet::from([j]))
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.gather(&rows, cols)
    }

    /// Relabels rows and columns: entry `(i, j)` of the result is entry
    /// `(row_perm[i], col_perm[j])` of `self`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Matrix> {
        let is_perm = |p: &[usize], n: usize| {
            let mut seen = vec![false; n];
            p.len() == n
                && p.iter()
                    .all(|&k| k < n && !std::mem::replace(&mut seen[k], true))
        };
        if !is_perm(row_perm, self.rows) || !is_perm(col_perm, self.cols) {
            return Err(Error::usage("not a permutation of the matrix indices"));
        }
        let mut out = self.gather(row_perm, col_perm);
        out.symmetric = self.symmetric && row_perm == col_perm;
        Ok(out)
    }

    /// `[self; other]`.
    pub fn stack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols || self.field != other.field {
            return Err(Error::usage(
                "vertical stacking needs equal column counts and fields",
            ));
        }
        Matrix::block(
            self,
            &Matrix::zeros(self.rows, 0, self.field),
            other,
            &Matrix::zeros(other.rows, 0, self.field),
        )
    }

    /// `[self | other]`.
    pub fn augment(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.field != other.field {
            return Err(Error::usage(
                "horizontal stacking needs equal row counts and fields",
            ));
        }
        Matrix::block(
            self,
            other,
            &Matrix::zeros(0, self.cols, self.field),
            &Matrix::zeros(0, other.cols, self.field),
        )
    }

    /// Appends a row vector at the bottom.
    pub fn append_row(&self, row: &[FieldElement]) -> Result<Matrix> {
        if row.len() != self.cols {
            return Err(Error::usage(format!(
                "row of length {} does not fit {} columns",
                row.len(),
                self.cols
            )));
        }
        self.stack(&Matrix::from_rows(self.field, &[row.to_vec()])?)
    }

    /// The 2x2 block matrix `[[a, b], [c, d]]`.
    pub fn block(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Result<Matrix> {
        let field = a.field;
        if [b, c, d].iter().any(|m| m.field != field)
            || a.rows != b.rows
            || c.rows != d.rows
            || a.cols != c.cols
            || b.cols != d.cols
        {
            return Err(Error::usage("block dimensions or fields do not match"));
        }
        let mut out = Matrix::zeros(a.rows + c.rows, a.cols + b.cols, field);
        for (src, r0, c0) in [
            (a, 0, 0),
            (b, 0, a.cols),
            (c, a.rows, 0),
            (d, a.rows, a.cols),
        ] {
            for i in 0..src.rows {
                for j in 0..src.cols {
                    if src.is_nonzero(i, j) {
                        out.copy_entry_from(r0 + i, c0 + j, src, i, j);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self · x`.
    pub fn mul_vec(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.cols {
            return Err(Error::usage("vector length does not match column count"));
        }
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for (j, xj) in x.iter().enumerate() {
                    if self.is_nonzero(i, j) && !xj.is_zero() {
                        acc = acc.add(&self.get(i, j).mul(xj)?)?;
                    }
                }
                Ok(acc)
            })
            .collect()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}
