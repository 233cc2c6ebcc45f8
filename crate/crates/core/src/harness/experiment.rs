use std::cell::Cell;
use std::collections::BTreeMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{Algorithm, GraphSource, Resolved};
use super::output::outcome_json;
use super::HarnessError;
use crate::algorithms::crowdedbin::{configuration, is_good_configuration};
use crate::algorithms::{BlindMatch, CrowdedBin, Ppush, SharedBit, SimSharedBit};
use crate::engine::{
    own_tokens, run_trial, Engine, EngineError, NodeBehavior, RoundOutcome, SimConfig, World,
};
use crate::graph::{generate, DynamicTopology};
use crate::metrics::is_eps_gossip_complete;
use crate::randomness::SharedString;
use crate::rng::{derive, Purpose};

/// One trial's results as written to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub completion_round: Option<u64>,
    pub eps_completion_round: Option<u64>,
    pub rounds_run: u64,
    pub connections: u64,
    pub bits_total: u64,
    pub trace_hash: String,
    pub phi_initial: u64,
    /// Rounds that started with φ > 0.
    pub active_rounds: u64,
    /// Rounds in which φ strictly decreased.
    pub progress_rounds: u64,
    /// `(round, φ)` samples, at most [`PHI_SAMPLES`] of them.
    pub phi_trajectory: Vec<(u64, u64)>,
    /// Algorithm-specific values keyed by prefixed column name.
    pub extras: BTreeMap<String, String>,
}

impl TrialResult {
    pub fn dnf(&self) -> bool {
        self.completion_round.is_none()
    }
}

/// Cap on stored φ samples per trial.
pub const PHI_SAMPLES: usize = 256;

fn downsample(points: &[(u64, u64)]) -> Vec<(u64, u64)> {
    if points.len() <= PHI_SAMPLES {
        return points.to_vec();
    }
    let step = points.len().div_ceil(PHI_SAMPLES);
    let mut out: Vec<_> = points.iter().step_by(step).copied().collect();
    if out.last() != points.last() {
        out.push(*points.last().expect("non-empty"));
    }
    out
}

/// Distribution of completion rounds over the trials that finished.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundStats {
    pub completed: usize,
    pub median: Option<f64>,
    pub mean: Option<f64>,
    pub p95: Option<u64>,
}

impl RoundStats {
    pub fn of(rounds: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = rounds.into_iter().collect();
        v.sort_unstable();
        let m = v.len();
        if m == 0 {
            return Self {
                completed: 0,
                median: None,
                mean: None,
                p95: None,
            };
        }
        let median = if m % 2 == 1 {
            v[m / 2] as f64
        } else {
            (v[m / 2 - 1] + v[m / 2]) as f64 / 2.0
        };
        let rank = (0.95 * m as f64).ceil() as usize;
        Self {
            completed: m,
            median: Some(median),
            mean: Some(v.iter().sum::<u64>() as f64 / m as f64),
            p95: Some(v[rank.clamp(1, m) - 1]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub success_fraction: f64,
    pub completion: RoundStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_completion: Option<RoundStats>,
}

impl Summary {
    pub fn of(records: &[TrialResult], with_eps: bool) -> Self {
        let completion = RoundStats::of(records.iter().filter_map(|r| r.completion_round));
        Self {
            trials: records.len(),
            success_fraction: completion.completed as f64 / records.len().max(1) as f64,
            completion,
            eps_completion: with_eps
                .then(|| RoundStats::of(records.iter().filter_map(|r| r.eps_completion_round))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub records: Vec<TrialResult>,
    pub summary: Summary,
}

/// Runs every trial (in parallel) and merges results by trial index.
pub fn run_experiment(cfg: &Resolved) -> Result<ExperimentResult, HarnessError> {
    let records = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_single(cfg, i, None))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = Summary::of(&records, cfg.epsilon.is_some());
    Ok(ExperimentResult { records, summary })
}

/// Seed of trial `index` under root `seed`.
pub fn trial_seed(root: u64, index: usize) -> u64 {
    derive(root, &[Purpose::Trial as u64, index as u64])
}

/// Topology used by trial `index`.
pub fn trial_topology(cfg: &Resolved, index: usize) -> Result<DynamicTopology, HarnessError> {
    match &cfg.source {
        GraphSource::Kind(kind) => {
            let seed = derive(trial_seed(cfg.seed, index), &[Purpose::Topology as u64]);
            Ok(generate(kind, seed)?)
        }
        GraphSource::File(t) => Ok(t.clone()),
    }
}

/// Engine configuration of trial `index`.
pub fn trial_sim_config(cfg: &Resolved, index: usize) -> SimConfig {
    let eps_t = (cfg.n.max(2) as f64).powi(-cfg.transfer_exponent);
    SimConfig::new(cfg.n, cfg.uid_space, cfg.b, trial_seed(cfg.seed, index))
        .with_max_rounds(cfg.max_rounds)
        .with_uid_assignment(cfg.uid_assignment)
        .with_transfer_epsilon(eps_t)
}

type Extras = BTreeMap<String, String>;

struct Setup<'a, 'w> {
    cfg: &'a Resolved,
    index: usize,
    sim: SimConfig,
    topology: DynamicTopology,
    trace: Option<&'w mut dyn Write>,
}

/// Runs trial `index` alone. With `trace`, writes one JSON line per round.
pub fn run_single(
    cfg: &Resolved,
    index: usize,
    trace: Option<&mut dyn Write>,
) -> Result<TrialResult, HarnessError> {
    let setup = Setup {
        cfg,
        index,
        sim: trial_sim_config(cfg, index),
        topology: trial_topology(cfg, index)?,
        trace,
    };
    match cfg.alg {
        Algorithm::Blindmatch => drive(setup, BlindMatch, |_, _| Ok(()), |_, _| {}),
        Algorithm::Sharedbit => {
            let string = match &cfg.shared_seed {
                Some(seed) => SharedString::from_seed(cfg.uid_space, seed),
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive(
                        setup.sim.seed,
                        &[Purpose::Shared as u64],
                    ));
                    SharedString::random(cfg.uid_space, &mut rng)
                }
            }
            .map_err(|e| HarnessError::config("uid_space", e.to_string()))?;
            drive(
                setup,
                SharedBit::new(string),
                |_, _| Ok(()),
                |e, x| {
                    x.insert("sharedbit_wraps".into(), e.behavior().wraps().to_string());
                },
            )
        }
        Algorithm::Simsharedbit => simsharedbit(setup),
        Algorithm::Ppush => {
            let rumor = own_tokens(&setup.sim, [0])[0]
                .iter()
                .next()
                .expect("node 0 holds its own token");
            drive(setup, Ppush::new(rumor), |_, _| Ok(()), |_, _| {})
        }
        Algorithm::Crowdedbin => crowdedbin(setup),
    }
}

fn simsharedbit(setup: Setup<'_, '_>) -> Result<TrialResult, HarnessError> {
    let converged: Cell<Option<u64>> = Cell::new(None);
    let mut last: Vec<u32> = Vec::new();
    drive(
        setup,
        SimSharedBit,
        |o: &RoundOutcome, e: &Engine<'_, SimSharedBit>| {
            let now: Vec<u32> = e.states().iter().map(|s| s.candidate().0).collect();
            if !last.is_empty() && now.iter().zip(&last).any(|(a, b)| a > b) {
                return Err(EngineError::Invariant {
                    round: o.round,
                    detail: "a SimSharedBit candidate increased".into(),
                });
            }
            let min = e.world().uids().iter().min().expect("n >= 2").0;
            let all_min = now.iter().all(|&c| c == min);
            match (converged.get(), all_min) {
                (None, true) => converged.set(Some(o.round)),
                (Some(_), false) => {
                    return Err(EngineError::Invariant {
                        round: o.round,
                        detail: "SimSharedBit candidates diverged after converging".into(),
                    })
                }
                _ => {}
            }
            last = now;
            Ok(())
        },
        |e, x| {
            let shared = e
                .states()
                .windows(2)
                .all(|w| w[0].string() == w[1].string());
            x.insert(
                "simsharedbit_converged_round".into(),
                converged.get().map_or(String::new(), |r| r.to_string()),
            );
            x.insert("simsharedbit_common_string".into(), shared.to_string());
        },
    )
}

fn crowdedbin(setup: Setup<'_, '_>) -> Result<TrialResult, HarnessError> {
    let params = setup.cfg.crowdedbin;
    let k = setup.cfg.k;
    let log_n = setup.cfg.uid_space.trailing_zeros();
    let mut last: Vec<u32> = Vec::new();
    let max_est = Cell::new(1u32);
    drive(
        setup,
        CrowdedBin::new(params),
        |o: &RoundOutcome, e: &Engine<'_, CrowdedBin>| {
            let now: Vec<u32> = e.states().iter().map(|s| s.est()).collect();
            if !last.is_empty() && now.iter().zip(&last).any(|(a, b)| a < b) {
                return Err(EngineError::Invariant {
                    round: o.round,
                    detail: "a CrowdedBin estimate decreased".into(),
                });
            }
            max_est.set(max_est.get().max(now.iter().copied().max().unwrap_or(1)));
            last = now;
            Ok(())
        },
        |e, x| {
            let (tags, bins) = configuration(e.states());
            let g = is_good_configuration(&tags, &bins, k, log_n, &params);
            let warnings: u64 = e.states().iter().map(|s| s.crowded_at_max()).sum();
            x.insert("crowdedbin_good".into(), g.good.to_string());
            x.insert(
                "crowdedbin_target_instance".into(),
                g.target.map_or(String::new(), |t| t.to_string()),
            );
            x.insert("crowdedbin_max_est".into(), max_est.get().to_string());
            x.insert("crowdedbin_unique_tags".into(), g.unique_tags.to_string());
            x.insert("crowdedbin_crowded_at_max".into(), warnings.to_string());
        },
    )
}

fn drive<B, O, F>(
    setup: Setup<'_, '_>,
    behavior: B,
    mut per_round: O,
    finish: F,
) -> Result<TrialResult, HarnessError>
where
    B: NodeBehavior,
    O: FnMut(&RoundOutcome, &Engine<'_, B>) -> Result<(), EngineError>,
    F: FnOnce(&Engine<'_, B>, &mut Extras),
{
    let Setup {
        cfg,
        index,
        sim,
        topology,
        mut trace,
    } = setup;
    let initial = own_tokens(&sim, 0..cfg.k);
    let epsilon = cfg.epsilon;
    let stop_node = cfg.stop_node;
    let mut eps_round: Option<u64> = None;
    let mut eps_error: Option<HarnessError> = None;
    let mut io_error: Option<std::io::Error> = None;

    let stop = |world: &World, round: u64| {
        if let (Some(eps), None, None) = (epsilon, eps_round, eps_error.as_ref()) {
            match is_eps_gossip_complete(world.token_sets(), world.uids(), eps) {
                Ok(true) => eps_round = Some(round),
                Ok(false) => {}
                Err(e) => eps_error = Some(HarnessError::Metrics(e)),
            }
        }
        match stop_node {
            Some(v) => world.tokens(v).len() == world.k(),
            None => world.is_gossip_complete(),
        }
    };
    let observe = |o: &RoundOutcome, e: &Engine<'_, B>| {
        if let Some(w) = trace.as_mut() {
            if let Err(err) = writeln!(w, "{}", outcome_json(o)) {
                io_error.get_or_insert(err);
            }
        }
        per_round(o, e)
    };
    let (record, engine) = run_trial(sim, behavior, &topology, initial, stop, observe)?;
    if let Some(e) = eps_error {
        return Err(e);
    }
    if let Some(e) = io_error {
        return Err(HarnessError::Io(e));
    }
    let mut extras = Extras::new();
    finish(&engine, &mut extras);
    Ok(TrialResult {
        trial: index,
        completion_round: record.completion_round,
        eps_completion_round: eps_round,
        rounds_run: record.rounds_run,
        connections: record.connections,
        bits_total: record.bits_total,
        trace_hash: record.trace_hash.clone(),
        phi_initial: record.phi_initial,
        active_rounds: record.active_rounds,
        progress_rounds: record.progress_rounds,
        phi_trajectory: downsample(
            &std::iter::once((0, record.phi_initial))
                .chain(record.phi_changes.iter().copied())
                .collect::<Vec<_>>(),
        ),
        extras,
    })
}
