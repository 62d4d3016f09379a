use frozenrank::{oracle, FieldElement, FieldSpec, FrozenMethod, IndexSet, Matrix, VariableType};
use proptest::collection::vec;
use proptest::prelude::*;

const PRIMES: [u64; 3] = [2, 3, 5];

fn field(k: usize) -> FieldSpec {
    FieldSpec::prime(PRIMES[k]).unwrap()
}

fn matrix(max_m: usize, max_n: usize) -> impl Strategy<Value = Matrix> {
    (0..3usize, 1..=max_m, 1..=max_n)
        .prop_flat_map(|(f, m, n)| (Just(f), Just(m), Just(n), vec(0i64..5, m * n)))
        .prop_map(|(f, m, n, vals)| Matrix::from_integers(m, n, field(f), &vals).unwrap())
}

fn square(max_n: usize) -> impl Strategy<Value = Matrix> {
    (0..3usize, 1..=max_n)
        .prop_flat_map(|(f, n)| (Just(f), Just(n), vec(0i64..5, n * n)))
        .prop_map(|(f, n, vals)| Matrix::from_integers(n, n, field(f), &vals).unwrap())
}

fn symmetric(max_n: usize, fields: usize) -> impl Strategy<Value = Matrix> {
    (0..fields, 1..=max_n)
        .prop_flat_map(|(f, n)| (Just(f), Just(n), vec(0i64..4, n * n)))
        .prop_map(|(f, n, vals)| {
            let sym: Vec<i64> = (0..n * n)
                .map(|k| {
                    let (i, j) = (k / n, k % n);
                    vals[i.min(j) * n + i.max(j)]
                })
                .collect();
            Matrix::from_integers(n, n, field(f), &sym).unwrap()
        })
}

/// A matrix together with a vector of the given orientation drawn over its field.
fn with_vector(
    max: usize,
    len_from_rows: bool,
) -> impl Strategy<Value = (Matrix, Vec<FieldElement>)> {
    matrix(max, max)
        .prop_flat_map(move |a| {
            let len = if len_from_rows { a.rows() } else { a.cols() };
            (Just(a), vec(0i64..5, len))
        })
        .prop_map(|(a, v)| {
            let f = a.field();
            let v = v.into_iter().map(|x| f.from_i64(x)).collect();
            (a, v)
        })
}

fn support(v: &[FieldElement]) -> IndexSet {
    (0..v.len()).filter(|&j| !v[j].is_zero()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn elimination_matches_enumeration(a in matrix(6, 6)) {
        let rank = a.rank();
        prop_assert_eq!(rank, oracle::rank(&a).unwrap());
        prop_assert_eq!(rank + a.nullity(), a.cols());
        prop_assert_eq!(rank, a.transpose().rank());
        let q = a.field().order().unwrap() as usize;
        prop_assert_eq!(oracle::kernel(&a).unwrap().len(), q.pow(a.nullity() as u32));
        for v in a.kernel_basis() {
            prop_assert!(a.mul_vec(&v).unwrap().iter().all(FieldElement::is_zero));
        }
    }

    #[test]
    fn frozen_sets_agree(a in matrix(7, 7)) {
        let by_rank = a.frozen_set(FrozenMethod::RankDrop).frozen;
        let by_kernel = a.frozen_set(FrozenMethod::KernelSupport).frozen;
        prop_assert_eq!(&by_rank, &by_kernel);
        prop_assert_eq!(by_kernel, oracle::frozen(&a).unwrap());
    }

    #[test]
    fn relations_match_enumeration(a in matrix(5, 6)) {
        for ell in 2..=a.cols().min(3) {
            prop_assert_eq!(a.proper_relations(ell).unwrap(), oracle::proper_relations(&a, ell).unwrap());
        }
        for j in 0..a.cols() {
            let s = IndexSet::from([j]);
            prop_assert_eq!(a.is_relation(&s).unwrap(), oracle::is_relation(&a, &s).unwrap());
        }
    }

    #[test]
    fn span_implications((a, b) in with_vector(6, false)) {
        let frozen = a.frozen();
        let supp = support(&b);
        let in_span = a.row_in_span(&b).unwrap();
        if supp.is_subset(&frozen) {
            prop_assert!(in_span);
        }
        if in_span && !supp.is_subset(&frozen) {
            prop_assert!(a.is_relation(&supp.difference(&frozen)).unwrap());
        }
    }

    #[test]
    fn appending_a_column_only_unfreezes((a, b) in with_vector(6, true)) {
        let col = Matrix::from_rows(a.field(), &[b]).unwrap().transpose();
        let wider = a.augment(&col).unwrap().frozen();
        let frozen = a.frozen();
        for i in 0..a.cols() {
            prop_assert!(!wider.contains(i) || frozen.contains(i));
        }
    }

    #[test]
    fn appending_a_row_only_freezes((a, c) in with_vector(6, false)) {
        let taller = a.append_row(&c).unwrap().frozen();
        prop_assert!(a.frozen().is_subset(&taller));
    }

    #[test]
    fn removing_a_row_equals_adding_its_unit_column(a in matrix(6, 6)) {
        let (m, n, f) = (a.rows(), a.cols(), a.field());
        for j in 0..m {
            let mut e = Matrix::zeros(m, 1, f);
            e.set(j, 0, &f.one()).unwrap();
            let removed = a.remove_row(j).unwrap().frozen();
            let widened = a.augment(&e).unwrap().frozen();
            for i in 0..n {
                prop_assert_eq!(removed.contains(i), widened.contains(i), "i={} j={}", i, j);
            }
        }
    }

    #[test]
    fn frailty_is_transpose_symmetric(a in square(7)) {
        let t = a.transpose();
        for i in 0..a.rows() {
            let x = a.classify_variable(i).unwrap() == VariableType::X;
            prop_assert_eq!(x, t.classify_variable(i).unwrap() == VariableType::X);
        }
    }

    #[test]
    fn symmetric_removal_trichotomy(a in symmetric(10, 2)) {
        for i in 0..a.rows() {
            let ty = a.classify_variable(i).unwrap();
            let want = 1 + usize::from(ty == VariableType::Y) - usize::from(ty == VariableType::Z);
            prop_assert_eq!(a.symmetric_removal_rank_drop(i).unwrap(), want);
        }
    }

    #[test]
    fn census_matches_direct_classification(a in matrix(7, 8)) {
        let census = a.rows().min(a.cols());
        let profile = a.type_census(census).unwrap();
        prop_assert!(profile.identities_hold());
        let batched = a.variable_types(census).unwrap();
        for (i, ty) in batched.iter().enumerate() {
            prop_assert_eq!(*ty, a.classify_variable(i).unwrap());
        }
    }

    #[test]
    fn permutation_invariance(
        (a, perm) in symmetric(8, 3).prop_flat_map(|a| {
            let n = a.rows();
            (Just(a), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        })
    ) {
        let n = a.rows();
        let b = a.permuted(&perm, &perm).unwrap();
        prop_assert_eq!(a.rank(), b.rank());
        let relabelled: IndexSet = b.frozen().iter().map(|i| perm[i]).collect();
        prop_assert_eq!(relabelled, a.frozen());
        prop_assert_eq!(a.type_census(n).unwrap(), b.type_census(n).unwrap());
    }

    #[test]
    fn text_round_trip(a in matrix(6, 6)) {
        prop_assert_eq!(Matrix::parse_text(&a.to_text()).unwrap(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn rational_rank_dominates_prime_reductions(
        (m, n, vals) in (1..=5usize, 1..=5usize).prop_flat_map(|(m, n)| (Just(m), Just(n), vec(-3i64..=3, m * n)))
    ) {
        let q = Matrix::from_integers(m, n, FieldSpec::Q, &vals).unwrap();
        let rank_q = q.rank();
        for p in [2, 3, 2_147_483_647] {
            let a = Matrix::from_integers(m, n, FieldSpec::prime(p).unwrap(), &vals).unwrap();
            prop_assert!(a.rank() <= rank_q);
        }
        prop_assert_eq!(
            q.frozen_set(FrozenMethod::RankDrop).frozen,
            q.frozen_set(FrozenMethod::KernelSupport).frozen
        );
    }
}
