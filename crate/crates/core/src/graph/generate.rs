use std::collections::HashSet;
use std::num::NonZeroU64;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DynamicTopology, GraphError, StaticTopology};

/// Attempts before a random generator gives up on producing a connected graph.
const RETRY_CAP: usize = 1000;

/// Graph families the generator supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    Complete {
        n: usize,
    },
    Ring {
        n: usize,
    },
    /// One center joined to `n - 1` leaves.
    Star {
        n: usize,
    },
    Path {
        n: usize,
    },
    /// Two adjacent centers, each with `delta` leaves (`n = 2 * delta + 2`).
    TwoStars {
        delta: usize,
    },
    /// Connected G(n, p), resampled until connected.
    RandomConnected {
        n: usize,
        p: f64,
    },
    /// Uniform-ish connected d-regular graph.
    RandomRegular {
        n: usize,
        d: usize,
    },
    /// A fresh connected G(n, p) every `tau` rounds.
    FreshRandomEachTau {
        n: usize,
        p: f64,
        tau: u64,
    },
}

impl GraphKind {
    pub fn name(&self) -> &'static str {
        match self {
            GraphKind::Complete { .. } => "complete",
            GraphKind::Ring { .. } => "ring",
            GraphKind::Star { .. } => "star",
            GraphKind::Path { .. } => "path",
            GraphKind::TwoStars { .. } => "two_stars",
            GraphKind::RandomConnected { .. } => "random_connected",
            GraphKind::RandomRegular { .. } => "random_regular",
            GraphKind::FreshRandomEachTau { .. } => "fresh_random_each_tau",
        }
    }

    pub fn node_count(&self) -> usize {
        match *self {
            GraphKind::Complete { n }
            | GraphKind::Ring { n }
            | GraphKind::Star { n }
            | GraphKind::Path { n }
            | GraphKind::RandomConnected { n, .. }
            | GraphKind::RandomRegular { n, .. }
            | GraphKind::FreshRandomEachTau { n, .. } => n,
            GraphKind::TwoStars { delta } => 2 * delta + 2,
        }
    }
}

fn invalid(msg: impl Into<String>) -> GraphError {
    GraphError::InvalidParams(msg.into())
}

fn check_n(n: usize, min: usize, kind: &str) -> Result<(), GraphError> {
    if n < min {
        return Err(invalid(format!("{kind} needs n >= {min}, got {n}")));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<(), GraphError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!(
            "edge probability must be in (0, 1], got {p}"
        )));
    }
    Ok(())
}

/// Builds a topology of the given family. Static kinds yield one snapshot
/// with `tau = inf`.
pub fn generate(kind: &GraphKind, seed: u64) -> Result<DynamicTopology, GraphError> {
    let graph = match *kind {
        GraphKind::Complete { n } => {
            check_n(n, 2, "complete")?;
            StaticTopology::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))?
        }
        GraphKind::Ring { n } => {
            check_n(n, 3, "ring")?;
            StaticTopology::from_edges(n, (0..n).map(|u| (u, (u + 1) % n)))?
        }
        GraphKind::Star { n } => {
            check_n(n, 2, "star")?;
            StaticTopology::from_edges(n, (1..n).map(|v| (0, v)))?
        }
        GraphKind::Path { n } => {
            check_n(n, 2, "path")?;
            StaticTopology::from_edges(n, (1..n).map(|v| (v - 1, v)))?
        }
        GraphKind::TwoStars { delta } => {
            if delta < 2 {
                return Err(invalid(format!("two_stars needs delta >= 2, got {delta}")));
            }
            let n = 2 * delta + 2;
            // Centers 0 and 1; leaves 2..2+delta hang off 0, the rest off 1.
            let edges = std::iter::once((0, 1))
                .chain((0..delta).map(|i| (0, 2 + i)))
                .chain((0..delta).map(|i| (1, 2 + delta + i)));
            StaticTopology::from_edges(n, edges)?
        }
        GraphKind::RandomConnected { n, p } => {
            check_n(n, 2, "random_connected")?;
            check_p(p)?;
            random_connected(n, p, seed)?
        }
        GraphKind::RandomRegular { n, d } => random_regular(n, d, seed)?,
        GraphKind::FreshRandomEachTau { n, p, tau } => {
            check_n(n, 2, "fresh_random_each_tau")?;
            check_p(p)?;
            let tau = NonZeroU64::new(tau).ok_or_else(|| invalid("tau must be >= 1"))?;
            return Ok(DynamicTopology::fresh_each_tau(n, p, tau, seed));
        }
    };
    Ok(DynamicTopology::fixed(graph))
}

/// Connected G(n, p) by rejection.
pub(crate) fn random_connected(n: usize, p: f64, seed: u64) -> Result<StaticTopology, GraphError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RETRY_CAP {
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| rng.gen_bool(p))
            .collect();
        let g = StaticTopology::from_edges_unchecked(n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GraphError::GenerationFailed {
        kind: "random_connected",
        attempts: RETRY_CAP,
    })
}

/// Random stub matching that only pairs stubs forming a new simple edge,
/// restarting when it gets stuck.
fn random_regular(n: usize, d: usize, seed: u64) -> Result<StaticTopology, GraphError> {
    check_n(n, 3, "random_regular")?;
    if d < 2 || d >= n {
        return Err(invalid(format!(
            "random_regular needs 2 <= d < n, got d = {d}, n = {n}"
        )));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(invalid(format!(
            "random_regular needs n * d even, got {n} * {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..RETRY_CAP {
        let mut stubs: Vec<usize> = (0..n).flat_map(|u| std::iter::repeat_n(u, d)).collect();
        let mut edges: HashSet<(usize, usize)> = HashSet::with_capacity(n * d / 2);
        while !stubs.is_empty() {
            let mut paired = false;
            for _ in 0..100 {
                let i = rng.gen_range(0..stubs.len());
                let j = rng.gen_range(0..stubs.len());
                let (u, v) = (stubs[i], stubs[j]);
                let key = (u.min(v), u.max(v));
                if i == j || u == v || edges.contains(&key) {
                    continue;
                }
                edges.insert(key);
                let (hi, lo) = (i.max(j), i.min(j));
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                paired = true;
                break;
            }
            if !paired {
                continue 'attempt;
            }
        }
        let mut edges: Vec<_> = edges.into_iter().collect();
        edges.sort_unstable();
        let g = StaticTopology::from_edges_unchecked(n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(GraphError::GenerationFailed {
        kind: "random_regular",
        attempts: RETRY_CAP,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{diameter, max_degree, vertex_expansion_exact, Tau};

    fn single(kind: GraphKind) -> StaticTopology {
        let d = generate(&kind, 11).unwrap();
        StaticTopology::clone(&d.snapshot_for_round(1).unwrap())
    }

    #[test]
    fn two_stars_shape() {
        let g = single(GraphKind::TwoStars { delta: 4 });
        assert_eq!(g.n(), 10);
        assert_eq!(max_degree(&g), 5);
        assert!(g.has_edge(0, 1));
        assert_eq!(g.degree(0), 5);
        assert_eq!(g.degree(1), 5);
        assert!((2..10).all(|leaf| g.degree(leaf) == 1));
    }

    #[test]
    fn ring_is_static() {
        let d = generate(&GraphKind::Ring { n: 8 }, 0).unwrap();
        assert_eq!(d.tau(), Tau::Infinite);
        assert!(d.is_static());
        assert_eq!(d.snapshot_for_round(1).unwrap().edge_count(), 8);
    }

    #[test]
    fn fresh_graphs_change_every_tau() {
        let d = generate(
            &GraphKind::FreshRandomEachTau {
                n: 16,
                p: 0.3,
                tau: 2,
            },
            5,
        )
        .unwrap();
        let m = d.materialize(9).unwrap();
        let rounds: Vec<u64> = m
            .snapshots()
            .unwrap()
            .iter()
            .map(|s| s.from_round)
            .collect();
        assert_eq!(rounds, vec![1, 3, 5, 7, 9]);
        assert!(m.validate_stability().ok);
        assert!(d.validate_stability().ok);
        assert_eq!(
            d.snapshot_for_round(3).unwrap(),
            d.snapshot_for_round(4).unwrap()
        );
        assert_eq!(
            *d.snapshot_for_round(7).unwrap(),
            *generate(
                &GraphKind::FreshRandomEachTau {
                    n: 16,
                    p: 0.3,
                    tau: 2
                },
                5
            )
            .unwrap()
            .snapshot_for_round(8)
            .unwrap()
        );
    }

    #[test]
    fn regular_degrees() {
        let g = single(GraphKind::RandomRegular { n: 16, d: 4 });
        assert!((0..16).all(|u| g.degree(u) == 4));
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(
            generate(&GraphKind::TwoStars { delta: 1 }, 0),
            Err(GraphError::InvalidParams(_))
        ));
        assert!(generate(&GraphKind::RandomRegular { n: 5, d: 3 }, 0).is_err());
        assert!(generate(&GraphKind::RandomConnected { n: 5, p: 0.0 }, 0).is_err());
        assert!(matches!(
            generate(&GraphKind::RandomConnected { n: 40, p: 0.001 }, 0),
            Err(GraphError::GenerationFailed { .. })
        ));
    }

    /// Diameter versus expansion sanity across small generated families:
    /// `diameter * alpha <= 2 * log2(n)`.
    #[test]
    fn diameter_expansion_sanity() {
        let mut kinds = Vec::new();
        for n in 4..=20 {
            kinds.push(GraphKind::Complete { n });
            kinds.push(GraphKind::Ring { n });
            kinds.push(GraphKind::Star { n });
            kinds.push(GraphKind::Path { n });
            kinds.push(GraphKind::RandomConnected { n, p: 0.3 });
        }
        for delta in 2..=9 {
            kinds.push(GraphKind::TwoStars { delta });
        }
        for kind in kinds {
            let g = single(kind.clone());
            let a = vertex_expansion_exact(&g).unwrap();
            let alpha = *a.numer() as f64 / *a.denom() as f64;
            let lhs = diameter(&g).unwrap() as f64 * alpha;
            assert!(lhs <= 2.0 * (g.n() as f64).log2(), "{kind:?}: {lhs}");
        }
    }
}
