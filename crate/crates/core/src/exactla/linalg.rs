use super::elim::{self, RowEchelon};
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::field::FieldElement;

impl Matrix {
    /// Rank over the matrix's field.
    pub fn rank(&self) -> usize {
        elim::rank(self)
    }

    /// `cols - rank`, the dimension of the right kernel.
    pub fn nullity(&self) -> usize {
        self.cols() - self.rank()
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> RowEchelon {
        elim::echelon(self, true, self.cols())
    }

    /// A basis of `{x : A x = 0}`, one vector per non-pivot column.
    pub fn kernel_basis(&self) -> Vec<Vec<FieldElement>> {
        let ech = self.rref();
        let field = self.field();
        let mut is_pivot = vec![false; self.cols()];
        for &c in &ech.pivot_cols {
            is_pivot[c] = true;
        }
        (0..self.cols())
            .filter(|&f| !is_pivot[f])
            .map(|free| {
                let mut v = vec![field.zero(); self.cols()];
                v[free] = field.one();
                for (r, &pc) in ech.pivot_cols.iter().enumerate() {
                    if ech.form.is_nonzero(r, free) {
                        v[pc] = ech.form.get(r, free).neg();
                    }
                }
                v
            })
            .collect()
    }

    /// Whether `b` lies in the span of the rows.
    pub fn row_in_span(&self, b: &[FieldElement]) -> Result<bool> {
        if b.len() != self.cols() {
            return Err(Error::usage(format!(
                "vector of length {} for a matrix with {} columns",
                b.len(),
                self.cols()
            )));
        }
        Ok(self.append_row(b)?.rank() == self.rank())
    }
}
