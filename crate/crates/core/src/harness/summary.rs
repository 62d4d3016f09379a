use serde::Serialize;

use super::record::TrialRecord;
use crate::analytic::min_r;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSummary {
    pub field: String,
    pub trials: usize,
    pub mean_normalized_rank: f64,
    pub stddev_normalized_rank: f64,
    /// `|mean normalized rank - min R(d)|`
    pub abs_gap: f64,
    /// Mean of `1 - ks_isolated / n`, the per-instance upper bound.
    pub mean_leaf_bound: f64,
    pub leaf_bound_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusSummary {
    pub trials: usize,
    pub mean_residual_y: f64,
    pub mean_residual_u: f64,
    pub mean_residual_v: f64,
    pub mean_z_deficit: f64,
    pub mean_alpha: f64,
    pub identity_failures: usize,
}

impl CensusSummary {
    /// Largest of the mean residuals.
    pub fn worst_residual(&self) -> f64 {
        self.mean_residual_y
            .max(self.mean_residual_u)
            .max(self.mean_residual_v)
            .max(self.mean_z_deficit)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairGap {
    pub a: String,
    pub b: String,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub n: usize,
    pub d: f64,
    #[serde(rename = "analytic_min_R")]
    pub analytic_min_r: f64,
    pub fields: Vec<FieldSummary>,
    pub pairwise_gaps: Vec<PairGap>,
    pub census: Option<CensusSummary>,
}

impl SummaryReport {
    pub fn max_pairwise_gap(&self) -> f64 {
        self.pairwise_gaps.iter().map(|g| g.gap).fold(0.0, f64::max)
    }

    pub fn leaf_bound_violations(&self) -> usize {
        self.fields.iter().map(|f| f.leaf_bound_violations).sum()
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Aggregates records; fields appear in order of first occurrence.
pub fn summarize(records: &[TrialRecord]) -> Result<SummaryReport> {
    let (n, d) = records.first().map_or((0, 0.0), |r| (r.n, r.d));
    let analytic = min_r(d)?;
    let mut labels: Vec<&str> = Vec::new();
    for r in records {
        if !labels.contains(&r.field.as_str()) {
            labels.push(&r.field);
        }
    }
    let fields: Vec<FieldSummary> = labels
        .iter()
        .map(|&label| {
            let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.field == label).collect();
            let m = mean(rs.iter().map(|r| r.normalized_rank));
            let var = if rs.len() > 1 {
                rs.iter()
                    .map(|r| (r.normalized_rank - m).powi(2))
                    .sum::<f64>()
                    / (rs.len() - 1) as f64
            } else {
                0.0
            };
            FieldSummary {
                field: label.to_string(),
                trials: rs.len(),
                mean_normalized_rank: m,
                stddev_normalized_rank: var.sqrt(),
                abs_gap: (m - analytic).abs(),
                mean_leaf_bound: mean(rs.iter().map(|r| 1.0 - r.ks_isolated as f64 / r.n as f64)),
                leaf_bound_violations: rs.iter().filter(|r| !r.respects_leaf_bound()).count(),
            }
        })
        .collect();
    let mut pairwise_gaps = Vec::new();
    for (i, a) in fields.iter().enumerate() {
        for b in &fields[i + 1..] {
            pairwise_gaps.push(PairGap {
                a: a.field.clone(),
                b: b.field.clone(),
                gap: (a.mean_normalized_rank - b.mean_normalized_rank).abs(),
            });
        }
    }
    let censuses: Vec<_> = records.iter().filter_map(|r| r.census.as_ref()).collect();
    let census = (!censuses.is_empty()).then(|| CensusSummary {
        trials: censuses.len(),
        mean_residual_y: mean(censuses.iter().map(|c| c.residuals.y)),
        mean_residual_u: mean(censuses.iter().map(|c| c.residuals.u)),
        mean_residual_v: mean(censuses.iter().map(|c| c.residuals.v)),
        mean_z_deficit: mean(censuses.iter().map(|c| c.residuals.z_deficit)),
        mean_alpha: mean(censuses.iter().map(|c| c.profile.alpha())),
        identity_failures: censuses
            .iter()
            .filter(|c| !c.profile.identities_hold())
            .count(),
    });
    Ok(SummaryReport {
        n,
        d,
        analytic_min_r: analytic,
        fields,
        pairwise_gaps,
        census,
    })
}
