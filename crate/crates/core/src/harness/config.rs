use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::algorithms::CrowdedBinParams;
use crate::engine::{UidAssignment, DEFAULT_TRANSFER_EXPONENT};
use crate::graph::{DynamicTopology, GraphFile, GraphKind, Tau};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Blindmatch,
    Sharedbit,
    Simsharedbit,
    Ppush,
    Crowdedbin,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Blindmatch => "blindmatch",
            Algorithm::Sharedbit => "sharedbit",
            Algorithm::Simsharedbit => "simsharedbit",
            Algorithm::Ppush => "ppush",
            Algorithm::Crowdedbin => "crowdedbin",
        }
    }

    fn min_tag_bits(self) -> u8 {
        match self {
            Algorithm::Blindmatch => 0,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum GraphName {
    Complete,
    Ring,
    Star,
    Path,
    TwoStars,
    RandomConnected,
    RandomRegular,
    FreshRandomEachTau,
    /// Load `graph_file`.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum UidMode {
    Sequential,
    RandomInjection,
}

/// Experiment description. The JSON config file uses the same field names
/// as the CLI flags (with underscores); flags override the file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Config file to load before applying flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub alg: Option<Algorithm>,
    #[arg(long, value_enum)]
    pub graph: Option<GraphName>,
    #[arg(long)]
    pub graph_file: Option<PathBuf>,
    /// Node count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Leaves per center for two_stars.
    #[arg(long)]
    pub delta: Option<usize>,
    /// Edge probability for random graphs.
    #[arg(long)]
    pub p: Option<f64>,
    /// Degree for random_regular.
    #[arg(long)]
    pub d: Option<usize>,
    /// UID space N (power of two); defaults to the smallest power of two >= n.
    #[arg(long)]
    pub uid_space: Option<u32>,
    /// Number of tokens; nodes 0..k start with their own token. Defaults to
    /// n, or 1 for ppush.
    #[arg(long)]
    pub k: Option<usize>,
    /// Tag length in bits.
    #[arg(long)]
    pub b: Option<u8>,
    /// Stability factor: a positive integer or "inf".
    #[arg(long)]
    pub tau: Option<Tau>,
    /// Also record the first round that reaches eps-gossip.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_rounds: Option<u64>,
    /// Stop once this node knows every token instead of waiting for all.
    #[arg(long)]
    pub stop_node: Option<usize>,
    #[arg(long, value_enum)]
    pub uid_assignment: Option<UidMode>,
    /// Transfer error exponent: each transfer fails with probability n^-c.
    #[arg(long)]
    pub transfer_exponent: Option<i32>,
    #[arg(long)]
    pub beta: Option<u32>,
    #[arg(long)]
    pub gamma: Option<u32>,
    /// Confidence constant checked against beta and gamma.
    #[arg(long)]
    pub confidence: Option<u32>,
    /// Hex seed of the SharedBit string (random per trial if absent).
    #[arg(long)]
    pub shared_seed: Option<String>,
    /// CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary path.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Omit the timestamp from the summary.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub deterministic: bool,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl ExperimentConfig {
    /// Loads `self.config` (if set) and applies every flag given here over it.
    pub fn load(self) -> Result<Self, HarnessError> {
        let mut base = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    HarnessError::config("config", format!("cannot read {}: {e}", path.display()))
                })?;
                serde_json::from_str::<ExperimentConfig>(&text).map_err(|e| {
                    HarnessError::config("config", format!("{}: {e}", path.display()))
                })?
            }
            None => ExperimentConfig::default(),
        };
        let top = self;
        overlay!(base, top; alg, graph, graph_file, n, delta, p, d, uid_space, k, b, tau,
            epsilon, trials, seed, max_rounds, stop_node, uid_assignment, transfer_exponent,
            beta, gamma, confidence, shared_seed, out, summary);
        base.deterministic |= top.deterministic;
        Ok(base)
    }

    /// Applies defaults and checks every invariant.
    pub fn resolve(&self) -> Result<Resolved, HarnessError> {
        let err = HarnessError::config;
        let alg = self
            .alg
            .ok_or_else(|| err("alg", "an algorithm is required".into()))?;
        let graph = self
            .graph
            .ok_or_else(|| err("graph", "a graph kind is required".into()))?;
        let tau = self.tau.unwrap_or(Tau::Infinite);

        let need = |v: Option<usize>, f: &'static str| {
            v.ok_or_else(|| err(f, format!("this graph kind needs --{f}")))
        };
        let p = || {
            self.p
                .ok_or_else(|| err("p", "random graphs need an edge probability".into()))
        };
        let source = match graph {
            GraphName::Complete => GraphSource::Kind(GraphKind::Complete {
                n: need(self.n, "n")?,
            }),
            GraphName::Ring => GraphSource::Kind(GraphKind::Ring {
                n: need(self.n, "n")?,
            }),
            GraphName::Star => GraphSource::Kind(GraphKind::Star {
                n: need(self.n, "n")?,
            }),
            GraphName::Path => GraphSource::Kind(GraphKind::Path {
                n: need(self.n, "n")?,
            }),
            GraphName::TwoStars => GraphSource::Kind(GraphKind::TwoStars {
                delta: need(self.delta, "delta")?,
            }),
            GraphName::RandomConnected => GraphSource::Kind(GraphKind::RandomConnected {
                n: need(self.n, "n")?,
                p: p()?,
            }),
            GraphName::RandomRegular => GraphSource::Kind(GraphKind::RandomRegular {
                n: need(self.n, "n")?,
                d: need(self.d, "d")?,
            }),
            GraphName::FreshRandomEachTau => {
                let Tau::Finite(t) = tau else {
                    return Err(err(
                        "tau",
                        "fresh_random_each_tau needs a finite tau".into(),
                    ));
                };
                GraphSource::Kind(GraphKind::FreshRandomEachTau {
                    n: need(self.n, "n")?,
                    p: p()?,
                    tau: t.get(),
                })
            }
            GraphName::File => {
                let path = self.graph_file.as_ref().ok_or_else(|| {
                    err("graph_file", "graph kind file needs --graph-file".into())
                })?;
                let topology = GraphFile::load(path)
                    .map_err(|e| err("graph_file", format!("{}: {e}", path.display())))?;
                GraphSource::File(topology)
            }
        };
        let n = source.node_count();
        if let Some(m) = self.n {
            if m != n {
                return Err(err("n", format!("n = {m} but the graph has {n} nodes")));
            }
        }
        let dynamic = match &source {
            GraphSource::Kind(GraphKind::FreshRandomEachTau { .. }) => true,
            GraphSource::Kind(_) => false,
            GraphSource::File(t) => !t.is_static(),
        };

        let uid_space = self
            .uid_space
            .unwrap_or_else(|| (n as u32).next_power_of_two().max(2));
        if !uid_space.is_power_of_two() {
            return Err(err(
                "uid_space",
                format!("N = {uid_space} is not a power of two"),
            ));
        }
        if (uid_space as usize) < n {
            return Err(err(
                "uid_space",
                format!("N = {uid_space} is smaller than n = {n}"),
            ));
        }

        let k = self
            .k
            .unwrap_or(if alg == Algorithm::Ppush { 1 } else { n });
        if k == 0 {
            return Err(err("k", "k must be >= 1".into()));
        }
        if k > n {
            return Err(err(
                "k",
                format!("k = {k} exceeds n = {n}; each token needs its own origin node"),
            ));
        }
        if alg == Algorithm::Ppush && k != 1 {
            return Err(err(
                "k",
                format!("ppush spreads a single rumor, got k = {k}"),
            ));
        }

        let b = self.b.unwrap_or(alg.min_tag_bits().max(1));
        if b < alg.min_tag_bits() {
            return Err(err(
                "b",
                format!("{} needs b >= {}, got {b}", alg.name(), alg.min_tag_bits()),
            ));
        }
        if b > 64 {
            return Err(err("b", format!("b = {b} exceeds 64")));
        }

        if let Some(eps) = self.epsilon {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(err(
                    "epsilon",
                    format!("epsilon must lie in (0, 1), got {eps}"),
                ));
            }
            if k != n {
                return Err(err(
                    "epsilon",
                    format!("eps-gossip needs k = n, got k = {k}, n = {n}"),
                ));
            }
        }

        if alg == Algorithm::Crowdedbin && (dynamic || !tau.is_infinite()) {
            return Err(err(
                "tau",
                "crowdedbin needs a static graph (tau = inf)".into(),
            ));
        }
        let defaults = CrowdedBinParams::default();
        let crowdedbin = CrowdedBinParams {
            beta: self.beta.unwrap_or(defaults.beta),
            gamma: self.gamma.unwrap_or(defaults.gamma),
            confidence: self.confidence.unwrap_or(defaults.confidence),
        };
        if alg == Algorithm::Crowdedbin {
            let log_n = uid_space.trailing_zeros();
            crowdedbin.validate(log_n).map_err(|m| err("gamma", m))?;
        }

        let trials = self.trials.unwrap_or(1);
        if trials == 0 {
            return Err(err("trials", "trials must be >= 1".into()));
        }
        let max_rounds = self.max_rounds.unwrap_or(1_000_000);
        if max_rounds == 0 {
            return Err(err("max_rounds", "max_rounds must be >= 1".into()));
        }
        if let Some(v) = self.stop_node {
            if v >= n {
                return Err(err("stop_node", format!("node {v} is outside 0..{n}")));
            }
        }
        let transfer_exponent = self.transfer_exponent.unwrap_or(DEFAULT_TRANSFER_EXPONENT);
        if transfer_exponent < 1 {
            return Err(err(
                "transfer_exponent",
                "transfer exponent must be >= 1".into(),
            ));
        }
        let shared_seed = match &self.shared_seed {
            Some(h) => Some(
                crate::randomness::Seed::from_hex(h)
                    .map_err(|e| err("shared_seed", e.to_string()))?,
            ),
            None => None,
        };
        if shared_seed.is_some() && alg != Algorithm::Sharedbit {
            return Err(err(
                "shared_seed",
                "only sharedbit reads a preshared string".into(),
            ));
        }

        Ok(Resolved {
            alg,
            source,
            n,
            uid_space,
            k,
            b,
            epsilon: self.epsilon,
            trials,
            seed: self.seed.unwrap_or(0),
            max_rounds,
            stop_node: self.stop_node,
            uid_assignment: match self.uid_assignment.unwrap_or(UidMode::Sequential) {
                UidMode::Sequential => UidAssignment::Sequential,
                UidMode::RandomInjection => UidAssignment::RandomInjection,
            },
            transfer_exponent,
            crowdedbin,
            shared_seed,
        })
    }
}

/// Where a trial's topology comes from.
#[derive(Debug, Clone)]
pub enum GraphSource {
    /// Generated per trial from the trial seed.
    Kind(GraphKind),
    File(DynamicTopology),
}

impl GraphSource {
    pub fn node_count(&self) -> usize {
        match self {
            GraphSource::Kind(k) => k.node_count(),
            GraphSource::File(t) => t.n(),
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub alg: Algorithm,
    pub source: GraphSource,
    pub n: usize,
    pub uid_space: u32,
    pub k: usize,
    pub b: u8,
    pub epsilon: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub max_rounds: u64,
    pub stop_node: Option<usize>,
    pub uid_assignment: UidAssignment,
    pub transfer_exponent: i32,
    pub crowdedbin: CrowdedBinParams,
    pub shared_seed: Option<crate::randomness::Seed>,
}
