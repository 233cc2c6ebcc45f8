use sha2::{Digest, Sha256};

use super::round::{Engine, RoundOutcome};
use super::world::World;
use super::{EngineError, NodeBehavior, SimConfig};
use crate::graph::DynamicTopology;
use crate::tokens::TokenSet;

/// Per-trial summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    /// First round after which `stop` held; `Some(0)` if it held initially.
    pub completion_round: Option<u64>,
    pub rounds_run: u64,
    pub phi_initial: u64,
    /// `(round, φ after round)` for every round that changed φ.
    pub phi_changes: Vec<(u64, u64)>,
    pub connections: u64,
    pub bits_total: u64,
    /// Rounds that started with φ > 0.
    pub active_rounds: u64,
    /// Rounds in which φ strictly decreased.
    pub progress_rounds: u64,
    /// SHA-256 over the canonical encoding of every round outcome.
    pub trace_hash: String,
}

impl TrialRecord {
    pub fn dnf(&self) -> bool {
        self.completion_round.is_none()
    }

    pub fn phi_final(&self) -> u64 {
        self.phi_changes
            .last()
            .map_or(self.phi_initial, |&(_, p)| p)
    }
}

/// Feeds one round into a running trace hash.
pub(crate) fn hash_round(h: &mut Sha256, o: &RoundOutcome) {
    let mut put = |x: u64| h.update(x.to_le_bytes());
    put(o.round);
    put(o.tags.len() as u64);
    for t in &o.tags {
        put(t.bits());
    }
    put(o.proposals.len() as u64);
    for &(p, t) in &o.proposals {
        put(p as u64);
        put(t as u64);
    }
    put(o.matching.len() as u64);
    for (&(p, a), &bits) in o.matching.iter().zip(&o.bits_used) {
        put(p as u64);
        put(a as u64);
        put(bits as u64);
    }
    put(o.transfers.len() as u64);
    for m in &o.transfers {
        put(m.token.0 as u64);
        put(m.from as u64);
        put(m.to as u64);
    }
    put(o.phi_after);
}

/// Runs rounds until `stop` holds or `max_rounds` is reached.
///
/// `stop` is evaluated before the first round (with round 0) and after every
/// round.
/// `observe` sees each outcome together with the engine state after it.
/// Reaching `max_rounds` is recorded as DNF, not an error.
pub fn run_trial<'t, B, S, O>(
    config: SimConfig,
    behavior: B,
    topology: &'t DynamicTopology,
    initial: Vec<TokenSet>,
    mut stop: S,
    mut observe: O,
) -> Result<(TrialRecord, Engine<'t, B>), EngineError>
where
    B: NodeBehavior,
    S: FnMut(&World, u64) -> bool,
    O: FnMut(&RoundOutcome, &Engine<'t, B>) -> Result<(), EngineError>,
{
    let max_rounds = config.max_rounds;
    let mut engine = Engine::new(config, behavior, topology, initial)?;
    let phi_initial = engine.world().potential();
    let mut hasher = Sha256::new();
    let mut record = TrialRecord {
        completion_round: None,
        rounds_run: 0,
        phi_initial,
        phi_changes: Vec::new(),
        connections: 0,
        bits_total: 0,
        active_rounds: 0,
        progress_rounds: 0,
        trace_hash: String::new(),
    };
    if stop(engine.world(), 0) {
        record.completion_round = Some(0);
    }
    while record.completion_round.is_none() && engine.round() < max_rounds {
        let outcome = engine.step()?;
        hash_round(&mut hasher, &outcome);
        record.rounds_run = outcome.round;
        record.connections += outcome.matching.len() as u64;
        record.bits_total += outcome.bits_used.iter().sum::<usize>() as u64;
        if outcome.phi_before > 0 {
            record.active_rounds += 1;
        }
        if outcome.phi_after < outcome.phi_before {
            record.progress_rounds += 1;
            record.phi_changes.push((outcome.round, outcome.phi_after));
        }
        observe(&outcome, &engine)?;
        if stop(engine.world(), outcome.round) {
            record.completion_round = Some(outcome.round);
        }
    }
    record.trace_hash = hex::encode(hasher.finalize());
    Ok((record, engine))
}
