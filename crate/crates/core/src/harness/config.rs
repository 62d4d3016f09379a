use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldKind, FieldSpec};

/// Template family for an experiment; random weights get a per-trial seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateChoice {
    AllOnes,
    Random,
}

impl std::str::FromStr for TemplateChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "allones" => Ok(TemplateChoice::AllOnes),
            "random" => Ok(TemplateChoice::Random),
            _ => Err(Error::usage(format!(
                "unknown template `{s}` (allones|random)"
            ))),
        }
    }
}

/// Size caps checked before any work starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest `n` ranked with exact rationals; above it `Q` ranks are the
    /// maximum over three large primes.
    pub rational_exact_n: usize,
    /// Largest `n` for the type census.
    pub census_n: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            rational_exact_n: 64,
            census_n: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub d: f64,
    pub field: FieldSpec,
    pub template: TemplateChoice,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(rename = "pert_P", default)]
    pub pert_p: Option<usize>,
    #[serde(default)]
    pub census: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(n: usize, d: f64, field: FieldSpec, trials: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            n,
            d,
            field,
            template: TemplateChoice::AllOnes,
            trials,
            master_seed,
            pert_p: None,
            census: false,
            output: None,
            workers: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::usage(format!("config: {e}")))
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::from_json(&text)
    }

    /// Edge probability `d / n`.
    pub fn p(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.d / self.n as f64
        }
    }

    pub fn validate(&self, limits: &Limits) -> Result<()> {
        if self.n == 0 {
            return Err(Error::usage("n must be positive"));
        }
        if self.trials == 0 {
            return Err(Error::usage("trials must be at least 1"));
        }
        if !(self.d.is_finite() && self.d >= 0.0) {
            return Err(Error::usage(format!(
                "d must be finite and >= 0, got {}",
                self.d
            )));
        }
        if self.d > self.n as f64 {
            return Err(Error::usage("d / n must be a probability"));
        }
        if self.census {
            match self.pert_p {
                None | Some(0) => {
                    return Err(Error::usage("a census needs a positive pert_P"));
                }
                Some(_) => {}
            }
            if self.n > limits.census_n {
                return Err(Error::Resource {
                    what: "census size n",
                    cap: limits.census_n,
                    got: self.n,
                });
            }
            if self.field.kind() == FieldKind::Rationals && self.n > limits.rational_exact_n {
                return Err(Error::Resource {
                    what: "census size n over Q",
                    cap: limits.rational_exact_n,
                    got: self.n,
                });
            }
        }
        Ok(())
    }
}
