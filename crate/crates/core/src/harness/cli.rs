//! Command-line interface of the `mobile-gossip` binary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::{Algorithm, ExperimentConfig, GraphName, GraphSource};
use super::experiment::{run_experiment, run_single, trial_seed};
use super::output::{default_out_dir, summary_json, write_csv};
use super::HarnessError;
use crate::graph::{generate, GraphFile, Tau};
use crate::rng::{derive, Purpose};

/// Trials used by the vertex expansion estimator on large graphs.
const ESTIMATE_TRIALS: usize = 2000;

#[derive(Debug, Parser)]
#[command(
    name = "mobile-gossip",
    version,
    about = "Gossip simulator for the mobile telephone model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and write one CSV row per trial.
    Run(ExperimentConfig),
    /// Inspect or generate topologies.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Re-run a single trial and write its per-round trace.
    Replay(ReplayArgs),
}

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Print vertex expansion, maximum degree and diameter.
    Stats(GraphArgs),
    /// Write a topology file.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct GraphArgs {
    /// Read this topology file instead of generating one.
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub graph: Option<GraphName>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub delta: Option<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub tau: Option<Tau>,
    /// Root seed; the topology matches the one trial `trial` of a run sees.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub trial: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Rounds to materialize for dynamic topologies.
    #[arg(long, default_value_t = 64)]
    pub rounds: u64,
    /// Output path; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    #[command(flatten)]
    pub experiment: ExperimentConfig,
    /// Trial index to replay.
    #[arg(long)]
    pub trial: usize,
    /// JSON lines trace path.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>, HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn target(explicit: &Option<PathBuf>, default_name: &str) -> Option<PathBuf> {
    explicit
        .clone()
        .or_else(|| default_out_dir().map(|d| d.join(default_name)))
}

impl GraphArgs {
    fn topology(&self) -> Result<crate::graph::DynamicTopology, HarnessError> {
        let cfg = ExperimentConfig {
            alg: Some(Algorithm::Blindmatch),
            graph: Some(if self.file.is_some() {
                GraphName::File
            } else {
                self.graph
                    .ok_or_else(|| HarnessError::config("graph", "pass --file or --graph".into()))?
            }),
            graph_file: self.file.clone(),
            n: self.n,
            delta: self.delta,
            p: self.p,
            d: self.d,
            tau: self.tau,
            ..ExperimentConfig::default()
        };
        match cfg.resolve()?.source {
            GraphSource::File(t) => Ok(t),
            GraphSource::Kind(kind) => {
                let seed = derive(
                    trial_seed(self.seed, self.trial),
                    &[Purpose::Topology as u64],
                );
                Ok(generate(&kind, seed)?)
            }
        }
    }
}

/// Executes a parsed command, writing reports to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run(args) => run(args, out),
        Command::Graph(GraphCommand::Stats(args)) => {
            let stats = args.topology()?.stats(ESTIMATE_TRIALS, args.seed)?;
            let alpha = match stats.alpha_exact {
                Some(a) if *a.denom() == 1 => a.numer().to_string(),
                Some(_) => format!("{}", stats.alpha),
                None => format!("{:.4} (estimate)", stats.alpha),
            };
            let diameter = stats.diameter.map_or("n/a".to_string(), |d| d.to_string());
            writeln!(
                out,
                "alpha={alpha} delta={} diameter={diameter}",
                stats.delta
            )?;
            Ok(())
        }
        Command::Graph(GraphCommand::Gen(args)) => {
            let topology = args.graph.topology()?;
            let topology = if topology.is_static() {
                topology
            } else {
                topology.materialize(args.rounds)?
            };
            let text = serde_json::to_string_pretty(&GraphFile::from_topology(&topology)?)?;
            match &args.out {
                Some(path) => writeln!(create(path)?, "{text}")?,
                None => writeln!(out, "{text}")?,
            }
            Ok(())
        }
        Command::Replay(args) => {
            let cfg = args.experiment.load()?;
            let resolved = cfg.resolve()?;
            if args.trial >= resolved.trials {
                return Err(HarnessError::config(
                    "trial",
                    format!("trial {} is outside 0..{}", args.trial, resolved.trials),
                ));
            }
            let path = target(&args.trace, &format!("trace_{}.jsonl", args.trial));
            let record = match &path {
                Some(p) => {
                    let mut w = create(p)?;
                    let r = run_single(&resolved, args.trial, Some(&mut w))?;
                    w.flush()?;
                    r
                }
                None => run_single(&resolved, args.trial, None)?,
            };
            let completion = record
                .completion_round
                .map_or("dnf".to_string(), |r| r.to_string());
            writeln!(
                out,
                "trial={} completion_round={completion} trace_hash={}",
                record.trial, record.trace_hash
            )?;
            Ok(())
        }
    }
}

fn run(args: ExperimentConfig, out: &mut dyn Write) -> Result<(), HarnessError> {
    let cfg = args.load()?;
    let resolved = cfg.resolve()?;
    let result = run_experiment(&resolved)?;
    match target(&cfg.out, "results.csv") {
        Some(path) => {
            let mut w = create(&path)?;
            write_csv(&mut w, &result.records)?;
            w.flush()?;
        }
        None => write_csv(&mut *out, &result.records)?,
    }
    if let Some(path) = target(&cfg.summary, "summary.json") {
        let mut w = create(&path)?;
        serde_json::to_writer_pretty(&mut w, &summary_json(&cfg, &result)?)?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(())
}
