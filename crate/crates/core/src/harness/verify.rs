//! Self-checks runnable from the command line. Each suite is a smaller
//! version of the property tests, seeded so runs are reproducible.

use std::f64::consts::E;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use crate::analytic::{self, g, h, integral_identity_residual, phi, r, solve_point};
use crate::error::{Error, Result};
use crate::exactla::{FrozenMethod, IndexSet, Matrix, VariableType};
use crate::field::{sample_nonzero, FieldElement, FieldSpec};
use crate::oracle;
use crate::perturb::{
    agreement_frequency, canonical_perturb, theta_c_matrix, theta_r_matrix, PerturbationFamilies,
    PerturbationFamily, PerturbationSpec,
};
use crate::randgraph::{
    karp_sipser, nullity_invariance_check, sample_graph, CouplingSource, LeafOrder, WeightTemplate,
};
use crate::seed::{hash_words, rng_from};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Oracle,
    Lemmas,
    Perturb,
    Analytic,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Suite::Oracle),
            "lemmas" => Ok(Suite::Lemmas),
            "perturb" => Ok(Suite::Perturb),
            "analytic" => Ok(Suite::Analytic),
            "all" => Ok(Suite::All),
            _ => Err(Error::usage(format!(
                "unknown suite `{s}` (oracle|lemmas|perturb|analytic|all)"
            ))),
        }
    }
}

/// Verdict of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: &'static str, name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        suite,
        name,
        passed,
        detail,
    }
}

pub fn verify(suite: Suite) -> Result<Vec<Check>> {
    Ok(match suite {
        Suite::Oracle => oracle_suite()?,
        Suite::Lemmas => lemma_suite()?,
        Suite::Perturb => perturb_suite()?,
        Suite::Analytic => analytic_suite()?,
        Suite::All => {
            let mut all = oracle_suite()?;
            all.extend(lemma_suite()?);
            all.extend(perturb_suite()?);
            all.extend(analytic_suite()?);
            all
        }
    })
}

fn small_fields() -> [FieldSpec; 3] {
    [
        FieldSpec::F2,
        FieldSpec::prime(3).expect("prime"),
        FieldSpec::prime(5).expect("prime"),
    ]
}

fn random_vector<R: Rng>(rng: &mut R, len: usize, field: FieldSpec) -> Vec<FieldElement> {
    (0..len)
        .map(|_| {
            if rng.random_bool(0.5) {
                sample_nonzero(rng, field)
            } else {
                field.zero()
            }
        })
        .collect()
}

fn oracle_suite() -> Result<Vec<Check>> {
    const S: &str = "oracle";
    let mut rng = rng_from(0x0AC1E);
    let (mut rank_bad, mut kernel_bad, mut frozen_bad, mut rel_bad, mut span_bad) = (0, 0, 0, 0, 0);
    let mut total = 0;
    for _ in 0..60 {
        for field in small_fields() {
            total += 1;
            let (m, n) = (rng.random_range(1..=5), rng.random_range(1..=5));
            let density = rng.random_range(0.2..0.8);
            let a = Matrix::random(&mut rng, m, n, field, density);
            let rank = a.rank();
            if rank != oracle::rank(&a)? {
                rank_bad += 1;
            }
            let basis = a.kernel_basis();
            let q = field.order().expect("finite") as usize;
            let annihilated = basis.iter().all(|v| {
                a.mul_vec(v)
                    .is_ok_and(|w| w.iter().all(FieldElement::is_zero))
            });
            if basis.len() != n - rank
                || !annihilated
                || oracle::kernel(&a)?.len() != q.pow((n - rank) as u32)
            {
                kernel_bad += 1;
            }
            let by_rank = a.frozen_set(FrozenMethod::RankDrop).frozen;
            let by_kernel = a.frozen_set(FrozenMethod::KernelSupport).frozen;
            if by_rank != by_kernel || by_kernel != oracle::frozen(&a)? {
                frozen_bad += 1;
            }
            if n >= 2 && a.proper_relations(2)? != oracle::proper_relations(&a, 2)? {
                rel_bad += 1;
            }
            let b = random_vector(&mut rng, n, field);
            let residues: Vec<u32> = b.iter().map(|e| e.as_residue().expect("prime")).collect();
            if a.row_in_span(&b)? != oracle::row_space(&a)?.contains(&residues) {
                span_bad += 1;
            }
        }
    }
    let verdict = |bad: usize| (bad == 0, format!("{bad} of {total} disagree"));
    Ok([
        ("rank_vs_row_space", rank_bad),
        ("kernel_basis", kernel_bad),
        ("frozen_methods", frozen_bad),
        ("proper_relations", rel_bad),
        ("row_in_span", span_bad),
    ]
    .into_iter()
    .map(|(name, bad)| {
        let (ok, detail) = verdict(bad);
        check(S, name, ok, detail)
    })
    .collect())
}

fn unit_column(m: usize, j: usize, field: FieldSpec) -> Matrix {
    let mut e = Matrix::zeros(m, 1, field);
    e.set(j, 0, &field.one()).expect("in range");
    e
}

fn lemma_suite() -> Result<Vec<Check>> {
    const S: &str = "lemmas";
    let mut rng = rng_from(0x1E44A);
    let mut out = Vec::new();

    let mut bad = 0;
    for _ in 0..40 {
        for field in [FieldSpec::F2, FieldSpec::prime(3)?] {
            let n = rng.random_range(1..=8);
            let a = Matrix::random_symmetric(&mut rng, n, field, 0.35);
            for i in 0..n {
                let ty = a.classify_variable(i)?;
                let want =
                    1 + usize::from(ty == VariableType::Y) - usize::from(ty == VariableType::Z);
                if a.symmetric_removal_rank_drop(i)? != want {
                    bad += 1;
                }
            }
        }
    }
    out.push(check(
        S,
        "symmetric_removal_trichotomy",
        bad == 0,
        format!("{bad} violations"),
    ));

    let (mut removal_bad, mut mono_bad, mut frail_bad, mut span_bad) = (0, 0, 0, 0);
    for _ in 0..60 {
        let field = small_fields()[rng.random_range(0..3)];
        let (m, n) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let a = Matrix::random(&mut rng, m, n, field, 0.4);
        let frozen = a.frozen();
        for j in 0..m {
            let removed = a.remove_row(j)?.frozen();
            let widened = a.augment(&unit_column(m, j, field))?.frozen();
            if (0..n).any(|i| removed.contains(i) != widened.contains(i)) {
                removal_bad += 1;
            }
        }
        let b = Matrix::from_rows(field, &[random_vector(&mut rng, m, field)])?.transpose();
        let with_col = a.augment(&b)?.frozen();
        let with_row = a.append_row(&random_vector(&mut rng, n, field))?.frozen();
        for i in 0..n {
            if (with_col.contains(i) && !frozen.contains(i))
                || (frozen.contains(i) && !with_row.contains(i))
            {
                mono_bad += 1;
            }
        }
        let sq = Matrix::random(&mut rng, m, m, field, 0.4);
        let t = sq.transpose();
        for i in 0..m {
            let x = sq.classify_variable(i)? == VariableType::X;
            if x != (t.classify_variable(i)? == VariableType::X) {
                frail_bad += 1;
            }
        }
        let v = random_vector(&mut rng, n, field);
        let supp: IndexSet = (0..n).filter(|&j| !v[j].is_zero()).collect();
        let in_span = a.row_in_span(&v)?;
        if supp.is_subset(&frozen) && !in_span {
            span_bad += 1;
        }
        if in_span && !supp.is_empty() && !supp.is_subset(&frozen) {
            let rest = supp.difference(&frozen);
            if !a.is_relation(&rest)? {
                span_bad += 1;
            }
        }
    }
    out.push(check(
        S,
        "row_removal_vs_unit_column",
        removal_bad == 0,
        format!("{removal_bad} violations"),
    ));
    out.push(check(
        S,
        "frozen_monotonicity",
        mono_bad == 0,
        format!("{mono_bad} violations"),
    ));
    out.push(check(
        S,
        "frail_transpose_symmetry",
        frail_bad == 0,
        format!("{frail_bad} violations"),
    ));
    out.push(check(
        S,
        "span_implications",
        span_bad == 0,
        format!("{span_bad} violations"),
    ));

    let (mut null_bad, mut order_bad) = (0, 0);
    for k in 0..30u64 {
        let n = 20 + (k as usize * 7) % 100;
        let d = [1.0, 2.0, 3.0][k as usize % 3];
        let field = if k % 2 == 0 {
            FieldSpec::F2
        } else {
            FieldSpec::prime(5)?
        };
        let graph = sample_graph(
            n,
            d / n as f64,
            &WeightTemplate::SeededRandomNonzero(k),
            &CouplingSource::new(hash_words(7, &[k])),
            field,
        );
        if !nullity_invariance_check(&graph, 2000)? {
            null_bad += 1;
        }
        let base = karp_sipser(&graph, LeafOrder::SmallestIndex);
        for s in 0..5 {
            let other = karp_sipser(&graph, LeafOrder::Random(hash_words(k, &[s])));
            if other.isolated_count() != base.isolated_count()
                || other.core_vertices != base.core_vertices
            {
                order_bad += 1;
            }
        }
    }
    out.push(check(
        S,
        "leaf_removal_nullity",
        null_bad == 0,
        format!("{null_bad} of 30 graphs"),
    ));
    out.push(check(
        S,
        "leaf_removal_order",
        order_bad == 0,
        format!("{order_bad} of 150 orders"),
    ));

    let mut perm_bad = 0;
    for _ in 0..30 {
        let field = small_fields()[rng.random_range(0..3)];
        let n = rng.random_range(2..=8);
        let a = Matrix::random_symmetric(&mut rng, n, field, 0.4);
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let b = a.permuted(&perm, &perm)?;
        let relabelled: IndexSet = b.frozen().iter().map(|i| perm[i]).collect();
        if a.rank() != b.rank()
            || relabelled != a.frozen()
            || a.type_census(n)?.counts != b.type_census(n)?.counts
        {
            perm_bad += 1;
        }
    }
    out.push(check(
        S,
        "permutation_invariance",
        perm_bad == 0,
        format!("{perm_bad} of 30"),
    ));
    Ok(out)
}

fn perturb_suite() -> Result<Vec<Check>> {
    const S: &str = "perturb";
    let mut out = Vec::new();
    let f2 = FieldSpec::F2;

    let mut nest_bad = 0;
    for s in 0..50u64 {
        let fam = PerturbationFamily::new(s);
        let (theta, n1, n2) = (1 + s as usize % 5, 1 + s as usize % 9, 10 + s as usize % 4);
        let base = theta_r_matrix(&fam, theta, n1, n2, f2)?;
        let none = IndexSet::empty();
        let wider = theta_r_matrix(&fam, theta, n1, n2 + 1, f2)?;
        let taller = theta_r_matrix(&fam, theta + 1, n1, n2, f2)?;
        let cols = theta_c_matrix(&fam, n1, n2, theta, f2)?;
        if wider.remove(&none, &IndexSet::from([n2]))? != base
            || taller.remove(&IndexSet::from([theta]), &none)? != base
            || cols != base.transpose()
        {
            nest_bad += 1;
        }
    }
    out.push(check(
        S,
        "nesting",
        nest_bad == 0,
        format!("{nest_bad} of 50"),
    ));

    let samples = 100_000u64;
    let mut worst = 0.0f64;
    let mut ok = true;
    for (i, (n0, n1, theta)) in [(2usize, 4usize, 1usize), (3, 5, 2), (5, 10, 3)]
        .into_iter()
        .enumerate()
    {
        let p = (n0 as f64 / n1 as f64).powi(theta as i32);
        let freq = agreement_frequency(n0, n1, theta, samples, 0xA6 + i as u64);
        let sigma = (p * (1.0 - p) / samples as f64).sqrt();
        let z = (freq - p).abs() / sigma;
        worst = worst.max(z);
        ok &= z <= 3.0;
    }
    out.push(check(
        S,
        "agreement_probability",
        ok,
        format!("worst deviation {worst:.2} sigma"),
    ));

    let n1 = 10;
    let mut counts = vec![0u64; n1];
    for s in 0..samples {
        counts[PerturbationFamily::new(hash_words(0xC41, &[s])).j(0, n1) - 1] += 1;
    }
    let expected = samples as f64 / n1 as f64;
    let chi2: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    // Upper 0.001 quantile of chi-square with 9 degrees of freedom.
    out.push(check(
        S,
        "target_uniformity",
        chi2 < 27.877,
        format!("chi-square {chi2:.2}"),
    ));

    let mut rng = rng_from(0x9E47);
    let (mut freeze_bad, mut rank_bad) = (0, 0);
    for t in 0..40u64 {
        let n = rng.random_range(2..=12);
        let a = Matrix::random_symmetric(&mut rng, n, f2, 0.25);
        let spec = PerturbationSpec::draw(4, t)?;
        let fams = PerturbationFamilies::for_trial(17, t);
        let ap = canonical_perturb(&a, &spec, &fams)?;
        let frozen = ap.frozen();
        if (0..spec.theta_r).any(|k| !frozen.contains(fams.rows.j(k, n) - 1)) {
            freeze_bad += 1;
        }
        let (r0, r1) = (a.rank(), ap.rank());
        if r1 < r0 || r1 > r0 + spec.theta_r + spec.theta_c {
            rank_bad += 1;
        }
    }
    out.push(check(
        S,
        "explicit_freezing",
        freeze_bad == 0,
        format!("{freeze_bad} of 40"),
    ));
    out.push(check(
        S,
        "rank_bounds",
        rank_bad == 0,
        format!("{rank_bad} of 40"),
    ));
    Ok(out)
}

const REFERENCE_MIN_R: [(f64, f64); 8] = [
    (0.1, 0.0911554126772786),
    (0.5, 0.345631947744951),
    (1.0, 0.544061907323596),
    (2.0, 0.783926426954236),
    (2.5, 0.865575793294474),
    (3.0, 0.927687457885459),
    (4.0, 0.977840311818603),
    (5.0, 0.992581074354835),
];

fn analytic_suite() -> Result<Vec<Check>> {
    const S: &str = "analytic";
    let mut out = Vec::new();

    let worst = REFERENCE_MIN_R
        .iter()
        .map(|&(d, want)| Ok((analytic::min_r(d)? - want).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(check(
        S,
        "reference_values",
        worst <= 1e-9,
        format!("max error {worst:.3e}"),
    ));

    let mut worst = 0.0f64;
    for d in [3.0, 4.0, 5.0] {
        let p = solve_point(d)?;
        worst = worst.max((r(d, p.alpha_star_lo) - r(d, p.alpha_star_hi)).abs());
    }
    out.push(check(
        S,
        "minimizer_equality",
        worst <= 1e-10,
        format!("max gap {worst:.3e}"),
    ));

    let mut worst = 0.0f64;
    for d in [1.0, E, 4.0] {
        worst = worst.max(integral_identity_residual(d)?);
    }
    out.push(check(
        S,
        "integral_identity",
        worst <= 1e-6,
        format!("max residual {worst:.3e}"),
    ));

    let (mut id_worst, mut gamma_worst) = (0.0f64, 0.0f64);
    for d in [1.0, 3.0, 5.0] {
        let p = solve_point(d)?;
        let (lo, hi) = (p.gamma_lo, p.gamma_hi);
        id_worst = id_worst.max((2.0 - (hi + lo + hi * lo) / d - p.min_r).abs());
        gamma_worst = gamma_worst
            .max((lo - d * (1.0 - p.alpha_star_hi)).abs())
            .max((hi - d * (1.0 - p.alpha_star_lo)).abs());
    }
    out.push(check(
        S,
        "leaf_removal_limit",
        id_worst <= 1e-8 && gamma_worst <= 1e-10,
        format!("identity {id_worst:.3e}, gamma {gamma_worst:.3e}"),
    ));

    let (mut root_worst, mut dual_worst, mut h_worst) = (0.0f64, 0.0f64, 0.0f64);
    let mut prev_min = 0.0;
    let mut monotone = true;
    for k in 1..=60 {
        let d = 0.1 * k as f64;
        let p = solve_point(d)?;
        for a in [p.alpha_star_lo, p.alpha_zero, p.alpha_star_hi] {
            root_worst = root_worst.max(g(d, a).abs());
        }
        dual_worst = dual_worst.max((p.alpha_star_lo - (1.0 - phi(d, p.alpha_star_hi))).abs());
        h_worst = h_worst.max((h(d, p.alpha_star_lo) - h(d, p.alpha_star_hi)).abs());
        monotone &= p.min_r >= prev_min - 1e-12;
        prev_min = p.min_r;
    }
    out.push(check(
        S,
        "root_quality",
        root_worst <= 1e-12,
        format!("max |G| {root_worst:.3e}"),
    ));
    out.push(check(
        S,
        "root_duality",
        dual_worst <= 1e-10,
        format!("max gap {dual_worst:.3e}"),
    ));
    out.push(check(
        S,
        "h_equality",
        h_worst <= 1e-10,
        format!("max gap {h_worst:.3e}"),
    ));
    out.push(check(S, "min_r_monotone", monotone, String::new()));

    let mut low_ok = true;
    for t in 3..=10 {
        let t = t as f64;
        low_ok &= solve_point(t)?.alpha_zero >= 1.0 - t.ln() / t;
    }
    out.push(check(S, "alpha_zero_lower_bound", low_ok, String::new()));
    Ok(out)
}
