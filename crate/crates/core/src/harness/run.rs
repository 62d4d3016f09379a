use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, Limits, TemplateChoice};
use super::record::{CensusRecord, Residuals, TrialRecord};
use super::summary::{summarize, SummaryReport};
use crate::error::{Error, Result};
use crate::exactla::Matrix;
use crate::field::{FieldKind, FieldSpec};
use crate::perturb::{canonical_perturb, PerturbationFamilies, PerturbationSpec};
use crate::randgraph::{
    karp_sipser, sample_graph, sample_t_graph, CouplingSource, Graph, LeafOrder, Permutation,
    WeightTemplate,
};
use crate::seed::{derive_seed, Purpose};

/// Primes whose maximal rank stands in for the rank over `Q` at large `n`.
pub const PROXY_PRIMES: [u64; 3] = [2_147_483_647, 2_147_483_629, 2_147_483_587];

/// Rank of the weighted adjacency matrix of `g`. Over `Q` above the exact
/// cap this is the maximum rank of the reductions modulo [`PROXY_PRIMES`],
/// a lower bound that is exact unless all three primes are unlucky.
pub fn graph_rank(g: &Graph, limits: &Limits) -> Result<usize> {
    if g.field().kind() != FieldKind::Rationals || g.vertex_count() <= limits.rational_exact_n {
        return Ok(g.adjacency_matrix().rank());
    }
    let mut best = 0;
    for p in PROXY_PRIMES {
        let fp = FieldSpec::prime(p)?;
        let mut m = Matrix::zeros(g.vertex_count(), g.vertex_count(), fp);
        for (i, j, w) in g.edges() {
            let r = fp.from_rational(w.as_rational().expect("rational weight"))?;
            m.set(*i, *j, &r)?;
            m.set(*j, *i, &r)?;
        }
        best = best.max(m.rank());
    }
    Ok(best)
}

fn label(field: FieldSpec, template: TemplateChoice, n: usize, limits: &Limits) -> String {
    let mut s = field.to_string();
    if field.kind() == FieldKind::Rationals && n > limits.rational_exact_n {
        s.push_str("[3p]");
    }
    if template == TemplateChoice::Random {
        s.push_str("/random");
    }
    s
}

/// One trial. Trials with the same `(master_seed, trial)` share their edge
/// set whatever the field or template.
pub fn run_trial(
    cfg: &ExperimentConfig,
    trial: u64,
    field: FieldSpec,
    template: TemplateChoice,
    limits: &Limits,
) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = |purpose| derive_seed(cfg.master_seed, trial, purpose);
    let coupling = CouplingSource::new(seed(Purpose::EdgeCoupling));
    let weights = match template {
        TemplateChoice::AllOnes => WeightTemplate::AllOnes,
        TemplateChoice::Random => WeightTemplate::SeededRandomNonzero(seed(Purpose::Weights)),
    };
    let n = cfg.n;
    let graph = if cfg.census {
        let perm = Permutation::uniform(n, seed(Purpose::Permutation));
        sample_t_graph(n, cfg.p(), &weights, &coupling, field, &perm)?
    } else {
        sample_graph(n, cfg.p(), &weights, &coupling, field)
    };
    let rank = graph_rank(&graph, limits)?;
    let ks = karp_sipser(&graph, LeafOrder::SmallestIndex);
    let census = if cfg.census {
        let pert_p = cfg
            .pert_p
            .ok_or_else(|| Error::usage("census needs pert_P"))?;
        let spec = PerturbationSpec::draw(pert_p, seed(Purpose::Theta))?;
        let fams = PerturbationFamilies::for_trial(cfg.master_seed, trial);
        let perturbed = canonical_perturb(&graph.adjacency_matrix(), &spec, &fams)?;
        let profile = perturbed.type_census(n)?;
        Some(CensusRecord {
            theta_r: spec.theta_r,
            theta_c: spec.theta_c,
            residuals: Residuals::of(&profile, cfg.d),
            profile,
        })
    } else {
        None
    };
    Ok(TrialRecord {
        trial_index: trial,
        derived_seed: coupling.seed,
        n,
        d: cfg.d,
        field: label(field, template, n, limits),
        rank,
        nullity: n - rank,
        ks_isolated: ks.isolated_count(),
        ks_core_size: ks.core_vertices.len(),
        normalized_rank: rank as f64 / n as f64,
        census,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Internal(format!("worker pool: {e}")))
}

/// Runs every trial for each `(field, template)` variant. Records come back
/// grouped by variant and ordered by trial index regardless of scheduling.
pub fn run_variants(
    cfg: &ExperimentConfig,
    variants: &[(FieldSpec, TemplateChoice)],
    limits: &Limits,
) -> Result<(Vec<TrialRecord>, SummaryReport)> {
    cfg.validate(limits)?;
    let jobs: Vec<(FieldSpec, TemplateChoice, u64)> = variants
        .iter()
        .flat_map(|&(f, t)| (0..cfg.trials as u64).map(move |k| (f, t, k)))
        .collect();
    let records = pool(cfg.workers)?.install(|| {
        jobs.par_iter()
            .map(|&(f, t, k)| run_trial(cfg, k, f, t, limits))
            .collect::<Result<Vec<_>>>()
    })?;
    let summary = summarize(&records)?;
    Ok((records, summary))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(Vec<TrialRecord>, SummaryReport)> {
    run_variants(cfg, &[(cfg.field, cfg.template)], &Limits::default())
}

/// The experiment with the type census switched on.
pub fn run_census(cfg: &ExperimentConfig) -> Result<(Vec<TrialRecord>, SummaryReport)> {
    let mut cfg = cfg.clone();
    cfg.census = true;
    run_experiment(&cfg)
}
