use rand::Rng;

use super::EngineError;
use crate::rng::{Purpose, RandomSource};
use crate::tokens::NodeId;

/// Turns proposals into a matching.
///
/// `proposals` holds `(proposer, target)` pairs; `listening[v]` marks nodes
/// that did not propose. Each listener with incoming proposals accepts one
/// chosen uniformly with its own `Accept` stream for `round`; proposals to
/// proposers fail. Listeners are visited in ascending id. Returns
/// `(proposer, acceptor)` pairs sorted by acceptor.
pub fn resolve_connections(
    proposals: &[(NodeId, NodeId)],
    listening: &[bool],
    rng: &RandomSource,
    round: u64,
) -> Result<Vec<(NodeId, NodeId)>, EngineError> {
    let n = listening.len();
    let mut incoming: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    let mut proposed = vec![false; n];
    for &(p, t) in proposals {
        if p >= n || t >= n {
            return Err(EngineError::Invariant {
                round,
                detail: format!("proposal {p}->{t} references a node outside 0..{n}"),
            });
        }
        if listening[p] {
            return Err(EngineError::Invariant {
                round,
                detail: format!("node {p} both proposed and listened"),
            });
        }
        if std::mem::replace(&mut proposed[p], true) {
            return Err(EngineError::Invariant {
                round,
                detail: format!("node {p} sent more than one proposal"),
            });
        }
        if p == t {
            return Err(EngineError::Invariant {
                round,
                detail: format!("node {p} proposed to itself"),
            });
        }
        incoming[t].push(p);
    }
    let mut matching = Vec::new();
    for (v, senders) in incoming.iter_mut().enumerate() {
        if !listening[v] || senders.is_empty() {
            continue;
        }
        senders.sort_unstable();
        let pick = if senders.len() == 1 {
            0
        } else {
            rng.node_round(v, round, Purpose::Accept)
                .gen_range(0..senders.len())
        };
        matching.push((senders[pick], v));
    }
    Ok(matching)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_symmetric_proposals() {
        let rng = RandomSource::new(9);
        let listening = [false, false, true];
        let mut first = 0;
        for round in 1..=10_000 {
            let m = resolve_connections(&[(0, 2), (1, 2)], &listening, &rng, round).unwrap();
            assert_eq!(m.len(), 1);
            first += (m[0].0 == 0) as u32;
        }
        assert!((first as f64 / 10_000.0 - 0.5).abs() < 0.02, "{first}");
    }

    #[test]
    fn proposer_cannot_accept() {
        // u=0 -> v=1, v=1 -> w=2; w listens
        let rng = RandomSource::new(1);
        let m = resolve_connections(&[(0, 1), (1, 2)], &[false, false, true], &rng, 1).unwrap();
        assert_eq!(m, vec![(1, 2)]);
    }

    #[test]
    fn empty_proposals() {
        let rng = RandomSource::new(1);
        assert!(resolve_connections(&[], &[true; 4], &rng, 1)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn rejects_listening_proposer() {
        let rng = RandomSource::new(1);
        assert!(resolve_connections(&[(0, 1)], &[true, true], &rng, 1).is_err());
    }
}
