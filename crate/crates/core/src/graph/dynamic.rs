use std::fmt;
use std::num::NonZeroU64;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::expansion::{diameter, max_degree, vertex_expansion_estimate, vertex_expansion_exact};
use super::generate::random_connected;
use super::{GraphError, GraphStats, StaticTopology, EXACT_EXPANSION_LIMIT};
use crate::rng::derive;

/// Stability factor: minimum number of rounds between topology changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tau {
    Finite(NonZeroU64),
    Infinite,
}

impl Tau {
    pub fn finite(rounds: u64) -> Option<Self> {
        NonZeroU64::new(rounds).map(Tau::Finite)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Tau::Infinite)
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tau::Finite(t) => write!(f, "{t}"),
            Tau::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Tau {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "infinity" | "INFINITY" => Ok(Tau::Infinite),
            _ => s
                .parse::<u64>()
                .ok()
                .and_then(Tau::finite)
                .ok_or_else(|| format!("tau must be a positive integer or \"inf\", got {s:?}")),
        }
    }
}

impl Serialize for Tau {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Tau::Finite(t) => s.serialize_u64(t.get()),
            Tau::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Tau {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(t) => {
                Tau::finite(t).ok_or_else(|| serde::de::Error::custom("tau must be >= 1"))
            }
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub from_round: u64,
    pub graph: Arc<StaticTopology>,
}

#[derive(Debug, Clone)]
enum Source {
    Snapshots(Vec<Snapshot>),
    /// Independent connected G(n, p) per epoch of `tau` rounds, generated on
    /// demand from `(seed, epoch)`.
    FreshEachTau {
        p: f64,
        seed: u64,
    },
}

/// A sequence of connected static graphs over a fixed node set, changing at
/// most once every `tau` rounds.
#[derive(Debug, Clone)]
pub struct DynamicTopology {
    n: usize,
    tau: Tau,
    source: Source,
}

/// Result of [`DynamicTopology::validate_stability`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub ok: bool,
    pub reasons: Vec<String>,
}

/// Epochs checked when validating a lazily generated topology.
const LAZY_VALIDATION_EPOCHS: u64 = 32;

impl DynamicTopology {
    pub fn fixed(graph: StaticTopology) -> Self {
        Self {
            n: graph.n(),
            tau: Tau::Infinite,
            source: Source::Snapshots(vec![Snapshot {
                from_round: 1,
                graph: Arc::new(graph),
            }]),
        }
    }

    /// Builds from explicit snapshots. Structural errors (empty list, mixed
    /// node counts, first snapshot not at round 1, unordered rounds) are
    /// rejected here; spacing against `tau` is reported by
    /// [`validate_stability`](Self::validate_stability).
    pub fn from_snapshots(tau: Tau, snapshots: Vec<Snapshot>) -> Result<Self, GraphError> {
        let first = snapshots
            .first()
            .ok_or_else(|| GraphError::InvalidDynamic("no snapshots".into()))?;
        if first.from_round != 1 {
            return Err(GraphError::InvalidDynamic(format!(
                "first snapshot starts at round {}, expected 1",
                first.from_round
            )));
        }
        let n = first.graph.n();
        for w in snapshots.windows(2) {
            if w[1].from_round <= w[0].from_round {
                return Err(GraphError::InvalidDynamic(format!(
                    "snapshot rounds not strictly increasing: {} then {}",
                    w[0].from_round, w[1].from_round
                )));
            }
        }
        if let Some(s) = snapshots.iter().find(|s| s.graph.n() != n) {
            return Err(GraphError::InvalidDynamic(format!(
                "snapshot at round {} has {} nodes, expected {n}",
                s.from_round,
                s.graph.n()
            )));
        }
        Ok(Self {
            n,
            tau,
            source: Source::Snapshots(snapshots),
        })
    }

    pub(crate) fn fresh_each_tau(n: usize, p: f64, tau: NonZeroU64, seed: u64) -> Self {
        Self {
            n,
            tau: Tau::Finite(tau),
            source: Source::FreshEachTau { p, seed },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> Tau {
        self.tau
    }

    pub fn is_static(&self) -> bool {
        matches!(&self.source, Source::Snapshots(s) if s.len() == 1)
    }

    /// Identifies the snapshot in force at `round`; equal epochs mean equal graphs.
    pub fn epoch_of(&self, round: u64) -> u64 {
        match &self.source {
            Source::Snapshots(s) => s
                .partition_point(|snap| snap.from_round <= round)
                .saturating_sub(1) as u64,
            Source::FreshEachTau { .. } => {
                let tau = match self.tau {
                    Tau::Finite(t) => t.get(),
                    Tau::Infinite => u64::MAX,
                };
                round.saturating_sub(1) / tau
            }
        }
    }

    /// Graph in force at `round` (rounds are 1-based).
    pub fn snapshot_for_round(&self, round: u64) -> Result<Arc<StaticTopology>, GraphError> {
        let epoch = self.epoch_of(round);
        match &self.source {
            Source::Snapshots(s) => Ok(s[epoch as usize].graph.clone()),
            Source::FreshEachTau { p, seed } => {
                random_connected(self.n, *p, derive(*seed, &[epoch])).map(Arc::new)
            }
        }
    }

    /// Explicit snapshot list covering rounds `1..=rounds`.
    pub fn materialize(&self, rounds: u64) -> Result<DynamicTopology, GraphError> {
        match &self.source {
            Source::Snapshots(_) => Ok(self.clone()),
            Source::FreshEachTau { .. } => {
                let tau = match self.tau {
                    Tau::Finite(t) => t.get(),
                    Tau::Infinite => unreachable!("fresh topologies have finite tau"),
                };
                let mut snapshots = Vec::new();
                let mut from = 1;
                while from <= rounds.max(1) {
                    snapshots.push(Snapshot {
                        from_round: from,
                        graph: self.snapshot_for_round(from)?,
                    });
                    from += tau;
                }
                DynamicTopology::from_snapshots(self.tau, snapshots)
            }
        }
    }

    /// Explicit snapshots, if this topology is not lazily generated.
    pub fn snapshots(&self) -> Option<&[Snapshot]> {
        match &self.source {
            Source::Snapshots(s) => Some(s),
            Source::FreshEachTau { .. } => None,
        }
    }

    /// Checks snapshot spacing against `tau` and per-snapshot connectivity.
    /// Lazily generated topologies are checked over their first epochs.
    pub fn validate_stability(&self) -> StabilityReport {
        let mut reasons = Vec::new();
        match &self.source {
            Source::Snapshots(snaps) => {
                match self.tau {
                    Tau::Infinite if snaps.len() > 1 => reasons.push(format!(
                        "tau = inf requires one snapshot, found {}",
                        snaps.len()
                    )),
                    Tau::Finite(t) => {
                        for w in snaps.windows(2) {
                            if w[1].from_round < w[0].from_round + t.get() {
                                reasons.push(format!(
                                    "snapshots at rounds {} and {} are closer than tau = {t}",
                                    w[0].from_round, w[1].from_round
                                ));
                            }
                        }
                    }
                    _ => {}
                }
                for s in snaps {
                    if !s.graph.is_connected() {
                        reasons.push(format!(
                            "snapshot at round {} is disconnected",
                            s.from_round
                        ));
                    }
                }
            }
            Source::FreshEachTau { .. } => {
                let tau = match self.tau {
                    Tau::Finite(t) => t.get(),
                    Tau::Infinite => 1,
                };
                for epoch in 0..LAZY_VALIDATION_EPOCHS {
                    let round = epoch * tau + 1;
                    match self.snapshot_for_round(round) {
                        Ok(g) if g.is_connected() => {}
                        Ok(_) => reasons.push(format!("snapshot at round {round} is disconnected")),
                        Err(e) => reasons.push(format!("snapshot at round {round}: {e}")),
                    }
                }
            }
        }
        StabilityReport {
            ok: reasons.is_empty(),
            reasons,
        }
    }

    /// α and Δ as minimum/maximum over snapshots (over the first epochs for
    /// lazily generated topologies); diameter only for a single snapshot.
    pub fn stats(&self, estimate_trials: usize, seed: u64) -> Result<GraphStats, GraphError> {
        let graphs: Vec<Arc<StaticTopology>> = match &self.source {
            Source::Snapshots(s) => s.iter().map(|s| s.graph.clone()).collect(),
            Source::FreshEachTau { .. } => {
                let tau = match self.tau {
                    Tau::Finite(t) => t.get(),
                    Tau::Infinite => 1,
                };
                (0..LAZY_VALIDATION_EPOCHS)
                    .map(|e| self.snapshot_for_round(e * tau + 1))
                    .collect::<Result<_, _>>()?
            }
        };
        let mut alpha_exact: Option<Ratio<u64>> = None;
        let mut alpha = f64::INFINITY;
        let exact = self.n <= EXACT_EXPANSION_LIMIT;
        for g in &graphs {
            if exact {
                let a = vertex_expansion_exact(g)?;
                alpha_exact = Some(alpha_exact.map_or(a, |b| b.min(a)));
                alpha = alpha.min(*a.numer() as f64 / *a.denom() as f64);
            } else {
                alpha = alpha.min(vertex_expansion_estimate(g, estimate_trials, seed)?);
            }
        }
        let delta = graphs.iter().map(|g| max_degree(g)).max().unwrap_or(0);
        let diameter = if graphs.len() == 1 && self.is_static() {
            Some(diameter(&graphs[0])?)
        } else {
            None
        };
        Ok(GraphStats {
            alpha,
            alpha_exact,
            delta,
            diameter,
        })
    }
}
