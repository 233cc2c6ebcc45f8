//! Completion predicates and analysis quantities over a snapshot of token
//! sets: the potential, gossip and ε-gossip completion, the frequency
//! multiset, and the greedy coalition used in ε-gossip analysis.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::tokens::{TokenSet, Uid};

/// Largest `n` for which the exact ε-gossip check runs.
pub const MAX_CLIQUE_NODES: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("exact eps-gossip check is limited to {limit} nodes, got {n}")]
    SizeLimit { n: usize, limit: usize },
    #[error("{sets} token sets but {owners} owners")]
    Mismatch { sets: usize, owners: usize },
    #[error("epsilon must lie in (0, 1), got {0}")]
    Epsilon(f64),
}

/// `φ = Σ_u (k − |T_u|)`.
pub fn potential(sets: &[TokenSet], k: usize) -> u64 {
    sets.iter().map(|s| k.saturating_sub(s.len()) as u64).sum()
}

pub fn is_gossip_complete(sets: &[TokenSet], k: usize) -> bool {
    sets.iter().all(|s| s.len() == k)
}

/// Nodes grouped by identical token set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyMultiset {
    /// `(set, number of nodes holding exactly it)`, by count descending then
    /// by set.
    pub entries: Vec<(TokenSet, usize)>,
}

impl FrequencyMultiset {
    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn max_count(&self) -> usize {
        self.entries.first().map_or(0, |e| e.1)
    }
}

pub fn frequency_multiset(sets: &[TokenSet]) -> FrequencyMultiset {
    let mut counts: BTreeMap<&TokenSet, usize> = BTreeMap::new();
    for s in sets {
        *counts.entry(s).or_default() += 1;
    }
    let mut entries: Vec<(TokenSet, usize)> =
        counts.into_iter().map(|(s, q)| (s.clone(), q)).collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    FrequencyMultiset { entries }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coalition {
    /// Some set is held by more than `εn` nodes.
    Solved,
    /// Indices into [`FrequencyMultiset::entries`] whose counts sum into
    /// `[(ε/2)n, εn]`.
    Members(Vec<usize>),
}

/// Greedy coalition over the frequency multiset. `ε` below 1/2 is raised to
/// 1/2.
pub fn coalition(f: &FrequencyMultiset, n: usize, epsilon: f64) -> Coalition {
    let eps = epsilon.max(0.5);
    let full = eps * n as f64;
    let half = full / 2.0;
    let q_max = f.max_count() as f64;
    if q_max > full {
        return Coalition::Solved;
    }
    if q_max >= half {
        return Coalition::Members(vec![0]);
    }
    let mut members = Vec::new();
    let mut sum = 0usize;
    for (i, e) in f.entries.iter().enumerate() {
        members.push(i);
        sum += e.1;
        if sum as f64 > half {
            break;
        }
    }
    Coalition::Members(members)
}

/// `⌈εn⌉`, robust to floating-point noise just above an integer.
pub fn eps_threshold(n: usize, epsilon: f64) -> usize {
    let x = epsilon * n as f64;
    let r = x.round();
    let t = if (x - r).abs() < 1e-9 { r } else { x.ceil() };
    (t as usize).max(1)
}

fn mutual_knowledge(sets: &[TokenSet], owners: &[Uid]) -> Vec<u64> {
    let n = sets.len();
    let mut adj = vec![0u64; n];
    for u in 0..n {
        for v in u + 1..n {
            if sets[u].contains(owners[v]) && sets[v].contains(owners[u]) {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
    }
    adj
}

/// Whether the graph has a clique of size `need`.
fn has_clique(adj: &[u64], need: usize) -> bool {
    fn extend(adj: &[u64], size: usize, cand: u64, need: usize) -> bool {
        if size >= need {
            return true;
        }
        let mut cand = cand;
        while cand != 0 {
            if size + (cand.count_ones() as usize) < need {
                return false;
            }
            let v = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            if extend(adj, size + 1, cand & adj[v], need) {
                return true;
            }
        }
        false
    }
    let all = if adj.len() == 64 {
        u64::MAX
    } else {
        (1u64 << adj.len()) - 1
    };
    extend(adj, 0, all, need)
}

/// Whether some set of at least `⌈εn⌉` nodes knows each other's tokens.
/// `owners[u]` is the token node `u` started with.
pub fn is_eps_gossip_complete(
    sets: &[TokenSet],
    owners: &[Uid],
    epsilon: f64,
) -> Result<bool, MetricsError> {
    if sets.len() != owners.len() {
        return Err(MetricsError::Mismatch {
            sets: sets.len(),
            owners: owners.len(),
        });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(MetricsError::Epsilon(epsilon));
    }
    let n = sets.len();
    let need = eps_threshold(n, epsilon);
    let f = frequency_multiset(sets);
    if f.max_count() >= need {
        let top = &f.entries[0].0;
        let holders_known = sets
            .iter()
            .zip(owners)
            .filter(|(s, _)| *s == top)
            .all(|(_, &o)| top.contains(o));
        if holders_known {
            return Ok(true);
        }
    }
    if n > MAX_CLIQUE_NODES {
        return Err(MetricsError::SizeLimit {
            n,
            limit: MAX_CLIQUE_NODES,
        });
    }
    Ok(has_clique(&mutual_knowledge(sets, owners), need))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sets(n: u32, v: &[&[u32]]) -> Vec<TokenSet> {
        v.iter()
            .map(|s| TokenSet::from_tokens(n, s.iter().copied()))
            .collect()
    }

    fn owners(n: u32) -> Vec<Uid> {
        (1..=n).map(Uid).collect()
    }

    #[test]
    fn potential_examples() {
        let s = sets(4, &[&[1], &[2], &[], &[]]);
        assert_eq!(potential(&s, 2), 6);
        let full = sets(4, &[&[1, 2], &[1, 2]]);
        assert_eq!(potential(&full, 2), 0);
        assert!(is_gossip_complete(&full, 2));
        assert!(!is_gossip_complete(&s, 2));
    }

    #[test]
    fn grouping() {
        let f = frequency_multiset(&sets(4, &[&[1], &[1], &[1, 2]]));
        assert_eq!(
            f.entries,
            vec![
                (TokenSet::from_tokens(4, [1]), 2),
                (TokenSet::from_tokens(4, [1, 2]), 1)
            ]
        );
        assert_eq!(f.total(), 3);
    }

    #[test]
    fn coalition_cases() {
        let f = frequency_multiset(&sets(8, &[&[1], &[1], &[1], &[2], &[2], &[3]]));
        assert_eq!(coalition(&f, 6, 0.5), Coalition::Members(vec![0]));

        let f = frequency_multiset(&sets(8, &[&[1], &[1], &[1], &[2]]));
        assert_eq!(coalition(&f, 4, 0.5), Coalition::Solved);

        let singles: Vec<Vec<u32>> = (1..=8).map(|i| vec![i]).collect();
        let refs: Vec<&[u32]> = singles.iter().map(|v| v.as_slice()).collect();
        let f = frequency_multiset(&sets(8, &refs));
        assert_eq!(coalition(&f, 8, 0.5), Coalition::Members(vec![0, 1, 2]));
    }

    #[test]
    fn eps_gossip_pairs() {
        // {1,2} know each other, {3,4} know each other
        let s = sets(4, &[&[1, 2], &[1, 2], &[3, 4], &[3, 4]]);
        assert!(is_eps_gossip_complete(&s, &owners(4), 0.5).unwrap());
        assert!(!is_eps_gossip_complete(&s, &owners(4), 0.75).unwrap());
    }

    #[test]
    fn eps_gossip_clique_without_equal_sets() {
        let s = sets(4, &[&[1, 2, 3], &[1, 2, 3, 4], &[1, 2, 3], &[4]]);
        assert!(is_eps_gossip_complete(&s, &owners(4), 0.75).unwrap());
        assert!(!is_eps_gossip_complete(&s, &owners(4), 0.99).unwrap());
    }

    #[test]
    fn thresholds() {
        assert_eq!(eps_threshold(4, 0.5), 2);
        assert_eq!(eps_threshold(10, 0.3), 3);
        assert_eq!(eps_threshold(10, 0.31), 4);
    }
}
