use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use frozenrank::analytic::{curve, write_curve_csv};
use frozenrank::harness::{
    run_census, run_experiment, verify, write_csv, ExperimentConfig, Limits, Suite, SummaryReport,
    TrialRecord,
};
use frozenrank::randgraph::{
    karp_sipser, nullity_invariance_check, sample_graph, CouplingSource, Graph, LeafOrder,
    WeightTemplate, NULLITY_CHECK_CAP,
};
use frozenrank::seed::{derive_seed, Purpose};
use frozenrank::{Error, FieldSpec, Matrix, Result};
use serde_json::{json, Value};

/// Exact ranks and frozen variables of sparse random symmetric matrices.
#[derive(Debug, Parser)]
#[command(name = "frozenrank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the limiting rank curve and its roots over a grid of d.
    Analytic {
        #[arg(long, default_value_t = 0.0)]
        d_min: f64,
        #[arg(long, default_value_t = 6.0)]
        d_max: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo ranks of sparse random matrices.
    Simulate(SimulateArgs),
    /// Type census of perturbed random matrices.
    Census(CensusArgs),
    /// Leaf removal on random graphs or on a graph file.
    Ks(KsArgs),
    /// Frozen sets and variable types of a matrix file.
    Classify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a self-check suite: oracle, lemmas, perturb, analytic or all.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Output {
    /// Trial CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary JSON; printed to stdout when --out is given and this is not.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Append wall-clock times, which makes the CSV nondeterministic.
    #[arg(long)]
    timings: bool,
    /// Worker threads, 0 for all cores.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// JSON experiment configuration.
    #[arg(long, conflicts_with_all = ["n", "d", "field", "trials", "seed", "template"])]
    config: Option<PathBuf>,
    #[arg(long, required_unless_present = "config")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "config")]
    d: Option<f64>,
    #[arg(long, default_value = "F2")]
    field: String,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "allones")]
    template: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct CensusArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: f64,
    /// Perturbation bound: θ is uniform on {1..P}².
    #[arg(long = "P", visible_alias = "pert-P")]
    pert_p: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "F2")]
    field: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct KsArgs {
    /// Graph file with header `n m field` and lines `i j weight`.
    #[arg(long, conflicts_with_all = ["n", "d"])]
    graph: Option<PathBuf>,
    #[arg(long, required_unless_present = "graph")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "graph")]
    d: Option<f64>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "F2")]
    field: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A check ran and failed; distinct from errors, which carry their own codes.
struct CheckFailed;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Domain(_) => 2,
        Error::Resource { .. } => 3,
        Error::Io { .. } | Error::Internal(_) => 1,
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_error(p, e))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_json(path: Option<&Path>, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("values serialize");
    let mut w = sink(path)?;
    writeln!(w, "{text}")
        .and_then(|_| w.flush())
        .map_err(|e| io_error(path.unwrap_or(Path::new("<stdout>")), e))
}

fn emit_run(records: &[TrialRecord], summary: &SummaryReport, output: &Output) -> Result<()> {
    write_csv(records, sink(output.out.as_deref())?, output.timings).map_err(|e| {
        match (e, &output.out) {
            (Error::Io { source, .. }, Some(p)) => io_error(p, source),
            (e, _) => e,
        }
    })?;
    let summary = serde_json::to_value(summary).expect("summary serializes");
    match (&output.summary, &output.out) {
        (Some(p), _) => write_json(Some(p), &summary),
        (None, Some(_)) => write_json(None, &summary),
        (None, None) => Ok(()),
    }
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => {
            let mut cfg = ExperimentConfig::new(
                args.n.expect("required by clap"),
                args.d.expect("required by clap"),
                args.field.parse()?,
                args.trials,
                args.seed,
            );
            cfg.template = args.template.parse()?;
            cfg
        }
    };
    if let Some(w) = args.output.workers {
        cfg.workers = w;
    }
    let mut output = args.output;
    if output.out.is_none() {
        output.out = cfg.output.clone();
    }
    let (records, summary) = if cfg.census {
        run_census(&cfg)?
    } else {
        run_experiment(&cfg)?
    };
    emit_run(&records, &summary, &output)
}

fn census(args: CensusArgs) -> Result<()> {
    let mut cfg =
        ExperimentConfig::new(args.n, args.d, args.field.parse()?, args.trials, args.seed);
    cfg.pert_p = Some(args.pert_p);
    cfg.census = true;
    cfg.workers = args.output.workers.unwrap_or(0);
    let (records, summary) = run_census(&cfg)?;
    emit_run(&records, &summary, &args.output)
}

fn ks_report(g: &Graph) -> Result<Value> {
    let ks = karp_sipser(g, LeafOrder::SmallestIndex);
    let n = g.vertex_count();
    let mut v = json!({
        "n": n,
        "edges": g.edge_count(),
        "ks_isolated": ks.isolated_count(),
        "ks_core_size": ks.core_vertices.len(),
        "ks_core_edges": ks.core.edge_count(),
        "removed_pairs": ks.removed_pairs.len(),
        "rank_upper_bound": if n == 0 { 0.0 } else { 1.0 - ks.isolated_count() as f64 / n as f64 },
    });
    if n <= NULLITY_CHECK_CAP {
        v["nullity_invariant"] = json!(nullity_invariance_check(g, NULLITY_CHECK_CAP)?);
    }
    Ok(v)
}

fn ks(args: KsArgs) -> Result<()> {
    let report = match &args.graph {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            ks_report(&Graph::parse_text(&text)?)?
        }
        None => {
            let (n, d) = (
                args.n.expect("required by clap"),
                args.d.expect("required by clap"),
            );
            let field: FieldSpec = args.field.parse()?;
            let cfg = ExperimentConfig::new(n, d, field, args.trials, args.seed);
            cfg.validate(&Limits::default())?;
            let mut trials = Vec::new();
            for t in 0..args.trials as u64 {
                let seed = derive_seed(args.seed, t, Purpose::EdgeCoupling);
                let g = sample_graph(
                    n,
                    cfg.p(),
                    &WeightTemplate::AllOnes,
                    &CouplingSource::new(seed),
                    field,
                );
                let mut v = ks_report(&g)?;
                v["trial_index"] = json!(t);
                v["derived_seed"] = json!(seed);
                trials.push(v);
            }
            Value::Array(trials)
        }
    };
    write_json(args.out.as_deref(), &report)
}

fn classify(path: &Path, out: Option<&Path>) -> Result<()> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let a = Matrix::parse_text(&text)?;
    let census = a.rows().min(a.cols());
    let frozen: Vec<usize> = a.frozen().iter().collect();
    let frozen_t: Vec<usize> = a.transpose().frozen().iter().collect();
    let report = json!({
        "rows": a.rows(),
        "cols": a.cols(),
        "field": a.field().to_string(),
        "rank": a.rank(),
        "nullity": a.nullity(),
        "frozen": frozen,
        "frozen_transpose": frozen_t,
        "types": a.variable_types(census)?,
        "profile": a.type_census(census)?,
    });
    write_json(out, &report)
}

fn run(cli: Cli) -> Result<std::result::Result<(), CheckFailed>> {
    match cli.command {
        Command::Analytic {
            d_min,
            d_max,
            step,
            out,
        } => {
            let rows = curve(d_min, d_max, step)?;
            write_curve_csv(&rows, sink(out.as_deref())?)?;
        }
        Command::Simulate(args) => simulate(args)?,
        Command::Census(args) => census(args)?,
        Command::Ks(args) => ks(args)?,
        Command::Classify { matrix, out } => classify(&matrix, out.as_deref())?,
        Command::Verify { suite, out } => {
            let checks = verify(suite.parse::<Suite>()?)?;
            let passed = checks.iter().all(|c| c.passed);
            write_json(
                out.as_deref(),
                &serde_json::to_value(&checks).expect("checks serialize"),
            )?;
            if !passed {
                return Ok(Err(CheckFailed));
            }
        }
    }
    Ok(Ok(()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(CheckFailed)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("frozenrank: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
