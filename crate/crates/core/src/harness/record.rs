use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::analytic::{csv_error, phi, type_functions, Zeta};
use crate::error::{Error, Result};
use crate::exactla::TypeProfile;

/// First line of every trial CSV.
pub const CSV_VERSION_LINE: &str = "#frozenrank-v1";

/// Deviations of one census from the type fixed-point equations at `t = d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    /// `|y - Y(ζ, φ_d)|`
    pub y: f64,
    /// `|u - U(ζ, φ_d)|`
    pub u: f64,
    /// `|v - V(ζ, φ_d)|`
    pub v: f64,
    /// `(z - φ_d(y))⁻`
    pub z_deficit: f64,
}

impl Residuals {
    pub fn of(profile: &TypeProfile, d: f64) -> Self {
        let zeta = Zeta::from_profile(profile);
        let tv = type_functions(&zeta, |a| phi(d, a));
        Residuals {
            y: (zeta.y - tv.y).abs(),
            u: (zeta.u - tv.u).abs(),
            v: (zeta.v - tv.v).abs(),
            z_deficit: (phi(d, zeta.y) - zeta.z).max(0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusRecord {
    pub theta_r: usize,
    pub theta_c: usize,
    pub profile: TypeProfile,
    pub residuals: Residuals,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    /// The edge-coupling seed of the trial.
    pub derived_seed: u64,
    pub n: usize,
    pub d: f64,
    pub field: String,
    pub rank: usize,
    pub nullity: usize,
    pub ks_isolated: usize,
    pub ks_core_size: usize,
    pub normalized_rank: f64,
    pub census: Option<CensusRecord>,
    pub elapsed_ms: f64,
}

impl TrialRecord {
    /// `rank / n <= 1 - ks_isolated / n`, compared on integers.
    pub fn respects_leaf_bound(&self) -> bool {
        self.rank + self.ks_isolated <= self.n
    }
}

const COLUMNS: [&str; 23] = [
    "trial_index",
    "derived_seed",
    "n",
    "d",
    "field",
    "rank",
    "nullity",
    "ks_isolated",
    "ks_core_size",
    "normalized_rank",
    "theta_r",
    "theta_c",
    "x",
    "y",
    "z",
    "u",
    "v",
    "alpha",
    "alpha_hat",
    "res_y",
    "res_u",
    "res_v",
    "res_z_deficit",
];

/// Writes records as CSV after the version line. Wall-clock times make the
/// output nondeterministic, so they are only written on request.
pub fn write_csv(records: &[TrialRecord], mut out: impl Write, timings: bool) -> Result<()> {
    writeln!(out, "{CSV_VERSION_LINE}").map_err(|e| Error::io("<csv output>", e))?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if timings {
        header.push("elapsed_ms");
    }
    w.write_record(&header).map_err(csv_error)?;
    for r in records {
        let mut row = vec![
            r.trial_index.to_string(),
            r.derived_seed.to_string(),
            r.n.to_string(),
            r.d.to_string(),
            r.field.clone(),
            r.rank.to_string(),
            r.nullity.to_string(),
            r.ks_isolated.to_string(),
            r.ks_core_size.to_string(),
            r.normalized_rank.to_string(),
        ];
        match &r.census {
            Some(c) => {
                let p = &c.profile;
                row.extend([c.theta_r.to_string(), c.theta_c.to_string()]);
                row.extend(
                    [
                        p.x(),
                        p.y(),
                        p.z(),
                        p.u(),
                        p.v(),
                        p.alpha(),
                        p.alpha_hat(),
                        c.residuals.y,
                        c.residuals.u,
                        c.residuals.v,
                        c.residuals.z_deficit,
                    ]
                    .iter()
                    .map(f64::to_string),
                );
            }
            None => row.extend(std::iter::repeat_n(String::new(), 13)),
        }
        if timings {
            row.push(format!("{:.3}", r.elapsed_ms));
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn write_csv_file(records: &[TrialRecord], path: &Path, timings: bool) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(records, std::io::BufWriter::new(file), timings).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}
