//! Monte Carlo experiments, result files and the verification suites.

mod config;
mod record;
mod run;
mod summary;
mod verify;

pub use config::{ExperimentConfig, Limits, TemplateChoice};
pub use record::{
    write_csv, write_csv_file, CensusRecord, Residuals, TrialRecord, CSV_VERSION_LINE,
};
pub use run::{graph_rank, run_census, run_experiment, run_trial, run_variants, PROXY_PRIMES};
pub use summary::{summarize, CensusSummary, FieldSummary, PairGap, SummaryReport};
pub use verify::{verify, Check, Suite};
