//! Coupled unit-row and unit-column perturbations.
//!
//! Row `k` (0-based) of `Θ_r[θ_r, n1 | n2]` has its single one at column
//! `j(k, n1) - 1`, where `j(k, n1) = max{ℓ ≤ n1 : u(k, ℓ) = ℓ}` and the
//! `u(k, ℓ)` are independent uniforms on `1..=ℓ`. Since `u(k, 1) = 1` the
//! maximum always exists. The construction makes the matrices nested in
//! `θ_r` and `n2`, and `j(k, n1)` uniform on `1..=n1`. Columns of `Θ_c` use an
//! independent family in the same way.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exactla::Matrix;
use crate::field::FieldSpec;
use crate::seed::{below, derive_seed, hash_words, rng_from, Purpose};

/// Levels `ℓ` with `u(k, ℓ) = ℓ` for one index `k`, known up to `scanned`.
#[derive(Debug, Clone, Default)]
struct Records {
    scanned: usize,
    levels: Vec<usize>,
}

#[derive(Debug)]
pub struct PerturbationFamily {
    seed: u64,
    cache: Mutex<HashMap<usize, Records>>,
}

impl Clone for PerturbationFamily {
    fn clone(&self) -> Self {
        PerturbationFamily {
            seed: self.seed,
            cache: Mutex::new(self.cache.lock().expect("cache lock").clone()),
        }
    }
}

impl PerturbationFamily {
    pub fn new(seed: u64) -> Self {
        PerturbationFamily {
            seed,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `u(k, ℓ)`, uniform on `1..=ℓ`.
    pub fn u(&self, k: usize, level: usize) -> usize {
        assert!(level >= 1, "levels start at 1");
        1 + below(
            hash_words(self.seed, &[k as u64, level as u64]),
            level as u64,
        ) as usize
    }

    /// `j(k, n1)`, in `1..=n1`.
    pub fn j(&self, k: usize, n1: usize) -> usize {
        assert!(n1 >= 1, "j(k, n1) needs n1 >= 1");
        let mut cache = self.cache.lock().expect("cache lock");
        let rec = cache.entry(k).or_default();
        if rec.scanned < n1 {
            for level in rec.scanned + 1..=n1 {
                if self.u(k, level) == level {
                    rec.levels.push(level);
                }
            }
            rec.scanned = n1;
        }
        let pos = rec.levels.partition_point(|&l| l <= n1);
        rec.levels[pos - 1]
    }
}

/// The independent row and column families of one draw.
#[derive(Debug, Clone)]
pub struct PerturbationFamilies {
    pub rows: PerturbationFamily,
    pub cols: PerturbationFamily,
}

impl PerturbationFamilies {
    pub fn new(row_seed: u64, col_seed: u64) -> Self {
        PerturbationFamilies {
            rows: PerturbationFamily::new(row_seed),
            cols: PerturbationFamily::new(col_seed),
        }
    }

    /// Families for one trial, in seed domains disjoint from everything else.
    pub fn for_trial(master_seed: u64, trial: u64) -> Self {
        PerturbationFamilies::new(
            derive_seed(master_seed, trial, Purpose::RowPerturbation),
            derive_seed(master_seed, trial, Purpose::ColumnPerturbation),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerturbationSpec {
    pub theta_r: usize,
    pub theta_c: usize,
    pub p: usize,
    pub theta_seed: u64,
}

impl PerturbationSpec {
    /// `(θ_r, θ_c)` uniform on `{1, ..., P}²`.
    pub fn draw(p: usize, theta_seed: u64) -> Result<Self> {
        if p == 0 {
            return Err(Error::usage("perturbation bound P must be positive"));
        }
        let mut rng = rng_from(theta_seed);
        Ok(PerturbationSpec {
            theta_r: rng.random_range(1..=p),
            theta_c: rng.random_range(1..=p),
            p,
            theta_seed,
        })
    }

    /// A fixed `θ`, for tests and explicit experiments.
    pub fn fixed(theta_r: usize, theta_c: usize) -> Self {
        PerturbationSpec {
            theta_r,
            theta_c,
            p: theta_r.max(theta_c),
            theta_seed: 0,
        }
    }
}

/// `Θ_r[θ_r, n1 | n2]`: `θ_r × n2`, row `k` is the unit vector at `j(k, n1) - 1`.
pub fn theta_r_matrix(
    fam: &PerturbationFamily,
    theta_r: usize,
    n1: usize,
    n2: usize,
    field: FieldSpec,
) -> Result<Matrix> {
    if n1 > n2 {
        return Err(Error::usage(format!("Θ_r needs n1 <= n2, got {n1} > {n2}")));
    }
    let mut m = Matrix::zeros(theta_r, n2, field);
    if n1 == 0 {
        if theta_r > 0 {
            return Err(Error::usage("Θ_r with rows needs n1 >= 1"));
        }
        return Ok(m);
    }
    for k in 0..theta_r {
        m.set_one(k, fam.j(k, n1) - 1);
    }
    Ok(m)
}

/// `Θ_c[m1 | m2, θ_c]`: `m2 × θ_c`, column `k` is the unit vector at `i(k, m1) - 1`.
pub fn theta_c_matrix(
    fam: &PerturbationFamily,
    m1: usize,
    m2: usize,
    theta_c: usize,
    field: FieldSpec,
) -> Result<Matrix> {
    if m1 > m2 {
        return Err(Error::usage(format!("Θ_c needs m1 <= m2, got {m1} > {m2}")));
    }
    let mut m = Matrix::zeros(m2, theta_c, field);
    if m1 == 0 {
        if theta_c > 0 {
            return Err(Error::usage("Θ_c with columns needs m1 >= 1"));
        }
        return Ok(m);
    }
    for k in 0..theta_c {
        m.set_one(fam.j(k, m1) - 1, k);
    }
    Ok(m)
}

/// `A[θ] = [[A, Θ_c[m | m, θ_c]], [Θ_r[θ_r, n | n], 0]]`.
pub fn canonical_perturb(
    a: &Matrix,
    spec: &PerturbationSpec,
    fams: &PerturbationFamilies,
) -> Result<Matrix> {
    let (m, n, field) = (a.rows(), a.cols(), a.field());
    let tc = theta_c_matrix(&fams.cols, m, m, spec.theta_c, field)?;
    let tr = theta_r_matrix(&fams.rows, spec.theta_r, n, n, field)?;
    let zero = Matrix::zeros(spec.theta_r, spec.theta_c, field);
    Matrix::block(a, &tc, &tr, &zero)
}

/// Fraction of `samples` families, seeded from `salt`, with
/// `Θ_r[θ, n0 | n2] = Θ_r[θ, n1 | n2]`; the law says `(n0 / n1)^θ`.
pub fn agreement_frequency(n0: usize, n1: usize, theta: usize, samples: u64, salt: u64) -> f64 {
    let hits = (0..samples)
        .filter(|&s| {
            let fam = PerturbationFamily::new(hash_words(salt, &[s]));
            (0..theta).all(|k| fam.j(k, n0) == fam.j(k, n1))
        })
        .count();
    hits as f64 / samples as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::IndexSet;

    #[test]
    fn first_level_is_always_a_record() {
        let fam = PerturbationFamily::new(3);
        for k in 0..50 {
            assert_eq!(fam.u(k, 1), 1);
            assert_eq!(fam.j(k, 1), 1);
            for level in 1..30 {
                assert!((1..=level).contains(&fam.u(k, level)));
            }
        }
    }

    #[test]
    fn memoized_j_matches_direct_scan() {
        let fam = PerturbationFamily::new(17);
        for k in 0..20 {
            // Query out of order so the cache is extended piecemeal.
            for n1 in [40, 3, 100, 1, 57] {
                let direct = (1..=n1).filter(|&l| fam.u(k, l) == l).max().unwrap();
                assert_eq!(fam.j(k, n1), direct);
            }
        }
    }

    #[test]
    fn theta_matrix_edge_cases() {
        let fam = PerturbationFamily::new(1);
        let f2 = FieldSpec::F2;
        let empty = theta_r_matrix(&fam, 0, 3, 5, f2).unwrap();
        assert_eq!((empty.rows(), empty.cols()), (0, 5));
        let ones = theta_r_matrix(&fam, 4, 1, 6, f2).unwrap();
        assert!((0..4).all(|k| ones.row_support(k) == IndexSet::from([0])));
        let cols = theta_c_matrix(&fam, 1, 3, 2, f2).unwrap();
        assert_eq!(cols.row_support(0), IndexSet::from([0, 1]));
        assert!(theta_r_matrix(&fam, 1, 5, 4, f2).is_err());
        assert!(theta_c_matrix(&fam, 5, 4, 1, f2).is_err());
    }

    #[test]
    fn nesting_in_rows_and_width() {
        let fam = PerturbationFamily::new(8);
        let f3 = FieldSpec::prime(3).unwrap();
        for (theta, n1, n2) in [(3, 5, 9), (6, 12, 12), (2, 1, 4)] {
            let base = theta_r_matrix(&fam, theta, n1, n2, f3).unwrap();
            let wider = theta_r_matrix(&fam, theta, n1, n2 + 1, f3).unwrap();
            let taller = theta_r_matrix(&fam, theta + 1, n1, n2, f3).unwrap();
            let none = IndexSet::empty();
            assert_eq!(wider.remove(&none, &IndexSet::from([n2])).unwrap(), base);
            assert_eq!(
                taller.remove(&IndexSet::from([theta]), &none).unwrap(),
                base
            );
        }
    }

    #[test]
    fn canonical_perturbation_shape_and_rank() {
        let fams = PerturbationFamilies::for_trial(5, 0);
        let f2 = FieldSpec::F2;
        let a = Matrix::zeros(2, 2, f2);
        assert_eq!(
            canonical_perturb(&a, &PerturbationSpec::fixed(0, 0), &fams).unwrap(),
            a
        );
        let p = canonical_perturb(&a, &PerturbationSpec::fixed(1, 0), &fams).unwrap();
        assert_eq!((p.rows(), p.cols()), (3, 2));
        assert_eq!(p.rank(), 1);
        let spec = PerturbationSpec::fixed(2, 3);
        let p = canonical_perturb(&a, &spec, &fams).unwrap();
        assert_eq!((p.rows(), p.cols()), (4, 5));
        let frozen = p.frozen();
        for k in 0..2 {
            assert!(frozen.contains(fams.rows.j(k, 2) - 1));
        }
    }

    #[test]
    fn drawn_theta_lies_in_range() {
        for seed in 0..200 {
            let s = PerturbationSpec::draw(8, seed).unwrap();
            assert!((1..=8).contains(&s.theta_r) && (1..=8).contains(&s.theta_c));
        }
        assert!(PerturbationSpec::draw(0, 1).is_err());
    }
}
