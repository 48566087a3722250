//! Command-line front end: ingest, generate, experiment.
//!
//! Stages communicate through snapshot files so the expensive steps are
//! cached and shareable. Exit codes: 0 success, 1 usage error, 2 data error,
//! 3 internal assertion (greedy routing failed to make progress, which a
//! valid positive-weight network cannot cause).

use crate::distance::DijkstraOracle;
use crate::experiments::{
    dropout_sweep, report_json, run_hop_experiment, sweep_clustering_exponent, write_degdist_csv,
    write_hops_csv, write_sweep_csv, ExperimentConfig, ExperimentError,
};
use crate::models::{self, ModelKind, ModelParams};
use crate::roadnet::{self, merge_networks, parse_dimacs, RoadNetwork};
use crate::routing::write_trace_csv;
use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

/// Seed used when --seed is absent. A fixed constant, never time-based, so
/// default runs reproduce exactly.
pub const DEFAULT_SEED: u64 = 0x5EED_5EED;

#[derive(Parser)]
#[command(
    name = "smallroads",
    about = "Small-world social networks over road networks: build, route, measure",
    version
)]
pub struct Cli {
    /// Worker threads for parallel stages; defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Parse DIMACS .gr/.co road files into a canonical network snapshot.
    Ingest(IngestArgs),
    /// Generate a social network over an ingested road network.
    Generate(GenerateArgs),
    /// Route sampled pairs and write report, CSVs, and sweeps.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
pub struct IngestArgs {
    /// DIMACS arc file; repeat together with --co for multi-state ingests.
    #[arg(long = "gr", required = true)]
    pub gr: Vec<PathBuf>,
    /// DIMACS coordinate file, paired with --gr by position.
    #[arg(long = "co", required = true)]
    pub co: Vec<PathBuf>,
    /// Stitch multiple inputs into one network by coordinate coincidence.
    #[arg(long)]
    pub merge: bool,
    /// Unification radius for --merge; 0 means exact coincidence.
    #[arg(long, default_value_t = 0.0)]
    pub stitch_radius: f64,
    /// Output roadnet snapshot path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Ingested roadnet snapshot.
    #[arg(long)]
    pub net: PathBuf,
    /// Model: kl, ba, npa, or npa-cap.
    #[arg(long)]
    pub model: String,
    /// Long-range links drawn per vertex.
    #[arg(long)]
    pub m: u32,
    /// Clustering exponent; required for kl/npa/npa-cap, rejected for ba.
    #[arg(long)]
    pub s: Option<f64>,
    /// Degree cap; npa-cap only.
    #[arg(long)]
    pub cap: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output socialnet snapshot path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ExperimentArgs {
    /// Socialnet snapshot produced by generate.
    #[arg(long)]
    pub soc: PathBuf,
    /// Roadnet snapshot the social network was generated from.
    #[arg(long)]
    pub net: PathBuf,
    /// Source/target pairs to route.
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    /// Dropout grid, comma-separated; the first value drives the main run.
    #[arg(long, value_delimiter = ',')]
    pub dropout: Vec<f64>,
    /// Clustering-exponent grid, comma-separated; regenerates the network
    /// per value.
    #[arg(long = "sweep-s", value_delimiter = ',')]
    pub sweep_s: Vec<f64>,
    /// Directory for report.json and CSVs.
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

pub enum AppError {
    /// Inconsistent or invalid flags; exit 1.
    Usage(String),
    /// Unreadable or malformed inputs; exit 2.
    Data(String),
    /// Violated internal invariant; exit 3.
    Internal(String),
}

impl AppError {
    fn code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 1,
            AppError::Data(_) => 2,
            AppError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Usage(m) | AppError::Data(m) | AppError::Internal(m) => m,
        }
    }
}

fn usage(msg: impl Into<String>) -> AppError {
    AppError::Usage(msg.into())
}

fn data(msg: impl Into<String>) -> AppError {
    AppError::Data(msg.into())
}

/// Parses arguments from the environment, runs, and returns the process exit
/// code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful terminations, not usage errors.
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return 1;
        }
        // Ignore failure: the global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let result = match &cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Experiment(args) => cmd_experiment(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn open_reader(path: &Path) -> Result<BufReader<File>, AppError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| data(format!("cannot open {}: {e}", path.display())))
}

fn create_writer(path: &Path) -> Result<BufWriter<File>, AppError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| data(format!("cannot create {}: {e}", path.display())))
}

fn write_out(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<(), AppError> {
    let mut w = create_writer(path)?;
    body(&mut w)
        .and_then(|()| w.flush())
        .map_err(|e| data(format!("cannot write {}: {e}", path.display())))
}

fn read_roadnet(path: &Path) -> Result<RoadNetwork, AppError> {
    roadnet::read_snapshot(open_reader(path)?)
        .map_err(|e| data(format!("{}: {e}", path.display())))
}

fn cmd_ingest(args: &IngestArgs) -> Result<(), AppError> {
    if args.gr.len() != args.co.len() {
        return Err(usage(format!(
            "{} --gr files but {} --co files; they pair by position",
            args.gr.len(),
            args.co.len()
        )));
    }
    if args.gr.len() > 1 && !args.merge {
        return Err(usage("multiple inputs require --merge"));
    }
    if args.stitch_radius < 0.0 || !args.stitch_radius.is_finite() {
        return Err(usage("--stitch-radius must be finite and nonnegative"));
    }
    let mut parsed = Vec::new();
    for (gr, co) in args.gr.iter().zip(&args.co) {
        let net = parse_dimacs(open_reader(gr)?, open_reader(co)?)
            .map_err(|e| data(format!("{}: {e}", gr.display())))?;
        parsed.push(net);
    }
    let net = if args.merge {
        let merged = merge_networks(&parsed, args.stitch_radius)
            .map_err(|e| data(e.to_string()))?;
        for w in &merged.warnings {
            eprintln!("warning: {w}");
        }
        merged.net
    } else {
        let lcc = roadnet::extract_lcc(&parsed[0]).map_err(|e| data(e.to_string()))?;
        roadnet::normalize_weights(&lcc).map_err(|e| data(e.to_string()))?
    };
    write_out(&args.out, |w| roadnet::write_snapshot(&net, w))?;
    println!(
        "n {} m {} min_weight {} max_weight {}",
        net.vertex_count(),
        net.edge_count(),
        net.min_weight().unwrap_or(f64::NAN),
        net.max_weight().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), AppError> {
    let kind: ModelKind = args.model.parse().map_err(usage)?;
    match kind {
        ModelKind::Ba => {
            if args.s.is_some() {
                return Err(usage("--s is meaningless for ba (degree-only weights)"));
            }
        }
        _ => {
            if args.s.is_none() {
                return Err(usage(format!("--s is required for {kind}")));
            }
        }
    }
    let params = ModelParams {
        kind,
        m: args.m,
        s: args.s.unwrap_or(0.0),
        cap: args.cap,
        seed: args.seed,
    };
    params.validate().map_err(|e| usage(e.to_string()))?;

    let base = Arc::new(read_roadnet(&args.net)?);
    let oracle = DijkstraOracle::new(Arc::clone(&base));
    let started = Instant::now();
    let soc = models::construct(base, params, &oracle).map_err(|e| data(e.to_string()))?;
    let wall = started.elapsed().as_secs_f64();
    write_out(&args.out, |w| models::write_snapshot(&soc, w))?;
    println!(
        "long_range_edges {} max_added_degree {} wall_time_s {wall:.3}",
        soc.long_range_count(),
        soc.max_added_degree()
    );
    Ok(())
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<(), AppError> {
    let base = Arc::new(read_roadnet(&args.net)?);
    let soc = models::read_snapshot(Arc::clone(&base), open_reader(&args.soc)?)
        .map_err(|e| data(format!("{}: {e}", args.soc.display())))?;
    let dataset = args
        .net
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "roadnet".to_string());
    let cfg = ExperimentConfig {
        dataset,
        num_pairs: args.pairs,
        dropout_ps: args.dropout.clone(),
        s_values: args.sweep_s.clone(),
        seed: args.seed,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| data(format!("cannot create {}: {e}", args.out_dir.display())))?;

    let oracle = DijkstraOracle::new(Arc::clone(&base));
    let started = Instant::now();
    let exp = run_hop_experiment(&soc, &cfg, &oracle).map_err(map_experiment_error)?;

    write_out(&args.out_dir.join("report.json"), |w| {
        w.write_all(report_json(&exp.report).as_bytes())
    })?;
    write_out(&args.out_dir.join("hops.csv"), |w| {
        write_hops_csv(&exp.report, w)
    })?;
    write_out(&args.out_dir.join("degdist.csv"), |w| {
        write_degdist_csv(&exp.report, w)
    })?;
    write_out(&args.out_dir.join("trace.csv"), |w| {
        let runs: Vec<(usize, &crate::routing::RoutingTrace)> = exp
            .results
            .iter()
            .enumerate()
            .map(|(i, r)| (i, &r.trace))
            .collect();
        write_trace_csv(w, &runs, true)
    })?;

    if !cfg.dropout_ps.is_empty() {
        let rows = dropout_sweep(&soc, &cfg, &oracle).map_err(map_experiment_error)?;
        write_out(&args.out_dir.join("sweep.csv"), |w| {
            write_sweep_csv(&rows, w)
        })?;
    }
    if !cfg.s_values.is_empty() {
        let rows = sweep_clustering_exponent(&base, *soc.params(), &cfg.s_values, &cfg, &oracle)
            .map_err(map_experiment_error)?;
        write_out(&args.out_dir.join("sweep-s.csv"), |w| {
            write_sweep_csv(&rows, w)
        })?;
    }

    let wall = started.elapsed().as_secs_f64();
    let mean = exp
        .report
        .summary
        .mean_hops
        .map(|m| m.to_string())
        .unwrap_or_else(|| "nan".to_string());
    println!(
        "mean_hops {mean} delivery_rate {} wall_time_s {wall:.3}",
        exp.report.summary.delivery_rate
    );
    Ok(())
}

fn map_experiment_error(e: ExperimentError) -> AppError {
    match e {
        ExperimentError::Routing(inner) => AppError::Internal(inner.to_string()),
        ExperimentError::BadConfig(msg) => usage(msg),
        other => data(other.to_string()),
    }
}
