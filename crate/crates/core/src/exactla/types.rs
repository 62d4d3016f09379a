//! The five-way typing of variables.
//!
//! For `i < min(m, n)`, variable `i` of `A` is
//! * frailly frozen if `i ∈ F(A)` but `i ∉ F(A⟨i;⟩)`,
//! * firmly frozen if `i ∈ F(A⟨i;⟩)`,
//! * completely frozen if firmly frozen in both `A` and `Aᵀ`.
//!
//! Frail freezing is symmetric under transposition, so every variable falls
//! in exactly one of the classes below.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::elim;
use super::matrix::{IndexSet, Matrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VariableType {
    /// Frailly frozen.
    X,
    /// Completely frozen.
    Y,
    /// Frozen in neither `A` nor `Aᵀ`.
    Z,
    /// Not frozen in `A`, firmly frozen in `Aᵀ`.
    U,
    /// Firmly frozen in `A`, not frozen in `Aᵀ`.
    V,
}

impl VariableType {
    pub const ALL: [VariableType; 5] = [
        VariableType::X,
        VariableType::Y,
        VariableType::Z,
        VariableType::U,
        VariableType::V,
    ];

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for VariableType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Membership facts about one variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Memberships {
    frozen: bool,
    firm: bool,
    frozen_t: bool,
    firm_t: bool,
}

impl Memberships {
    fn classify(self, i: usize) -> Result<VariableType> {
        let frail = self.frozen && !self.firm;
        let frail_t = self.frozen_t && !self.firm_t;
        if frail != frail_t {
            return Err(Error::Internal(format!(
                "variable {i} is frail on one side only"
            )));
        }
        Ok(match (frail, self.firm, self.firm_t) {
            (true, _, _) => VariableType::X,
            (false, true, true) => VariableType::Y,
            (false, false, false) => VariableType::Z,
            (false, false, true) => VariableType::U,
            (false, true, false) => VariableType::V,
        })
    }
}

/// Counts of each type among the variables `0..n`, plus the numbers of
/// frozen variables of `A` and `Aᵀ` in that range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeProfile {
    pub n: usize,
    /// Indexed by `VariableType as usize`: x, y, z, u, v.
    pub counts: [usize; 5],
    pub frozen: usize,
    pub frozen_transpose: usize,
}

impl TypeProfile {
    pub fn count(&self, t: VariableType) -> usize {
        self.counts[t.slot()]
    }

    pub fn proportion(&self, t: VariableType) -> f64 {
        self.count(t) as f64 / self.n as f64
    }

    pub fn x(&self) -> f64 {
        self.proportion(VariableType::X)
    }
    pub fn y(&self) -> f64 {
        self.proportion(VariableType::Y)
    }
    pub fn z(&self) -> f64 {
        self.proportion(VariableType::Z)
    }
    pub fn u(&self) -> f64 {
        self.proportion(VariableType::U)
    }
    pub fn v(&self) -> f64 {
        self.proportion(VariableType::V)
    }

    /// Proportion of frozen variables of `A`.
    pub fn alpha(&self) -> f64 {
        self.frozen as f64 / self.n as f64
    }

    /// Proportion of frozen variables of `Aᵀ`.
    pub fn alpha_hat(&self) -> f64 {
        self.frozen_transpose as f64 / self.n as f64
    }

    /// `x+y+z+u+v = 1`, `α = x+y+v` and `α̂ = x+y+u`, checked on the integer
    /// counts.
    pub fn identities_hold(&self) -> bool {
        let [x, y, z, u, v] = self.counts;
        x + y + z + u + v == self.n
            && self.frozen == x + y + v
            && self.frozen_transpose == x + y + u
    }
}

fn check_variable(a: &Matrix, i: usize) -> Result<()> {
    let bound = a.rows().min(a.cols());
    if i >= bound {
        return Err(Error::usage(format!(
            "variable {i} outside the typed range 0..{bound}"
        )));
    }
    Ok(())
}

impl Matrix {
    /// Type of variable `i`, straight from the four membership tests.
    pub fn classify_variable(&self, i: usize) -> Result<VariableType> {
        check_variable(self, i)?;
        let t = self.transpose();
        Memberships {
            frozen: self.frozen().contains(i),
            firm: self.remove_row(i)?.frozen().contains(i),
            frozen_t: t.frozen().contains(i),
            firm_t: t.remove_row(i)?.frozen().contains(i),
        }
        .classify(i)
    }

    /// Type proportions over the variables `0..census`.
    ///
    /// `census` excludes padding such as perturbation columns. The
    /// computation needs two eliminations of the matrix augmented by an
    /// identity block, one per side.
    pub fn type_census(&self, census: usize) -> Result<TypeProfile> {
        if census == 0 {
            return Err(Error::usage("type census over an empty variable range"));
        }
        check_variable(self, census - 1)?;
        let t = self.transpose();
        let (frozen, firm) = side_status(self, census);
        let (frozen_t, firm_t) = side_status(&t, census);
        let mut profile = TypeProfile {
            n: census,
            counts: [0; 5],
            frozen: frozen.iter().filter(|&&b| b).count(),
            frozen_transpose: frozen_t.iter().filter(|&&b| b).count(),
        };
        for i in 0..census {
            let ty = Memberships {
                frozen: frozen[i],
                firm: firm[i],
                frozen_t: frozen_t[i],
                firm_t: firm_t[i],
            }
            .classify(i)?;
            profile.counts[ty.slot()] += 1;
        }
        Ok(profile)
    }

    /// Per-variable types over `0..census`, by the batched method.
    pub fn variable_types(&self, census: usize) -> Result<Vec<VariableType>> {
        if census == 0 {
            return Ok(Vec::new());
        }
        check_variable(self, census - 1)?;
        let t = self.transpose();
        let (frozen, firm) = side_status(self, census);
        let (frozen_t, firm_t) = side_status(&t, census);
        (0..census)
            .map(|i| {
                Memberships {
                    frozen: frozen[i],
                    firm: firm[i],
                    frozen_t: frozen_t[i],
                    firm_t: firm_t[i],
                }
                .classify(i)
            })
            .collect()
    }

    /// `rank(A) - rank(A⟨i;i⟩)`.
    pub fn symmetric_removal_rank_drop(&self, i: usize) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::usage("symmetric removal needs a square matrix"));
        }
        check_variable(self, i)?;
        let idx = IndexSet::from([i]);
        Ok(self.rank() - self.remove(&idx, &idx)?.rank())
    }
}

/// For `i < census`: whether `i ∈ F(A)` and whether `i ∈ F(A⟨i;⟩)`.
///
/// Deleting row `i` enlarges the kernel to `{x : A x ∈ span(e_i)}`. If
/// `e_i` is outside the column space nothing changes; otherwise the kernel
/// gains a solution `x0` of `A x0 = e_i`, and a frozen `i` stays frozen iff
/// `x0_i = 0`. Reducing `[A | I]` with pivots restricted to `A` yields, in
/// the identity block, the transformation `E` with `E A = R`; `A x = e_i` is
/// solvable iff `E e_i` vanishes on the zero rows of `R`, and then
/// `x0_i = (E e_i)_r` for the row `r` pivoting on column `i`.
fn side_status(a: &Matrix, census: usize) -> (Vec<bool>, Vec<bool>) {
    let (m, c) = (a.rows(), a.cols());
    let aug = a
        .augment(&Matrix::identity(m, a.field()))
        .expect("identity block has matching rows");
    let ech = elim::echelon(&aug, true, c);
    let rank = ech.rank();
    let mut pivot_row = vec![None; c];
    for (r, &col) in ech.pivot_cols.iter().enumerate() {
        pivot_row[col] = Some(r);
    }
    let mut frozen = vec![false; census];
    let mut firm = vec![false; census];
    for i in 0..census {
        let Some(r) = pivot_row[i] else { continue };
        if ech.form.row_nnz_in(r, 0, c) != 1 {
            continue;
        }
        frozen[i] = true;
        let in_col_space = (rank..m).all(|k| !ech.form.is_nonzero(k, c + i));
        firm[i] = !in_col_space || !ech.form.is_nonzero(r, c + i);
    }
    (frozen, firm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use VariableType::*;

    fn p3() -> Matrix {
        Matrix::from_integers(3, 3, FieldSpec::F2, &[0, 1, 0, 1, 0, 1, 0, 1, 0]).unwrap()
    }

    #[test]
    fn classify_examples() {
        let q = FieldSpec::Q;
        let k2 = Matrix::from_integers(2, 2, q, &[0, -3, -3, 0]).unwrap();
        assert_eq!(k2.classify_variable(0).unwrap(), Y);
        assert_eq!(Matrix::zeros(1, 1, q).classify_variable(0).unwrap(), Z);
        assert_eq!(p3().classify_variable(1).unwrap(), Y);
        assert_eq!(p3().classify_variable(0).unwrap(), Z);
        assert!(p3().classify_variable(3).is_err());
    }

    #[test]
    fn census_examples() {
        let z = Matrix::zeros(4, 4, FieldSpec::F2).type_census(4).unwrap();
        assert_eq!(z.counts, [0, 0, 4, 0, 0]);
        let k2 = Matrix::from_integers(2, 2, FieldSpec::F2, &[0, 1, 1, 0]).unwrap();
        assert_eq!(k2.type_census(2).unwrap().counts, [0, 2, 0, 0, 0]);
        let p = p3().type_census(3).unwrap();
        assert_eq!(p.counts, [0, 1, 2, 0, 0]);
        assert!((p.y() - 1.0 / 3.0).abs() < 1e-15);
        assert!(p.identities_hold());
        assert!(Matrix::zeros(0, 0, FieldSpec::F2).type_census(0).is_err());
    }

    #[test]
    fn removal_rank_drop_examples() {
        let k2 = Matrix::from_integers(2, 2, FieldSpec::F2, &[0, 1, 1, 0]).unwrap();
        assert_eq!(k2.symmetric_removal_rank_drop(0).unwrap(), 2);
        assert_eq!(p3().symmetric_removal_rank_drop(0).unwrap(), 0);
        assert_eq!(p3().symmetric_removal_rank_drop(1).unwrap(), 2);
        let wide = Matrix::zeros(2, 3, FieldSpec::F2);
        assert!(wide.symmetric_removal_rank_drop(0).is_err());
    }

    #[test]
    fn frail_variable_exists() {
        // [1] freezes variable 0; without its only row nothing is frozen.
        let a = Matrix::from_integers(1, 1, FieldSpec::prime(3).unwrap(), &[1]).unwrap();
        assert_eq!(a.classify_variable(0).unwrap(), X);
        let p = a.type_census(1).unwrap();
        assert_eq!(p.counts, [1, 0, 0, 0, 0]);
        assert!(p.identities_hold());
    }

    #[test]
    fn batched_census_matches_direct_classification() {
        let f3 = FieldSpec::prime(3).unwrap();
        let a = Matrix::from_integers(
            4,
            5,
            f3,
            &[1, 1, 0, 0, 2, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 2, 0, 0, 1],
        )
        .unwrap();
        let batched = a.variable_types(4).unwrap();
        let direct: Vec<_> = (0..4).map(|i| a.classify_variable(i).unwrap()).collect();
        assert_eq!(batched, direct);
    }
}
