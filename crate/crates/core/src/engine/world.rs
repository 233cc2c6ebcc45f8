use rand::seq::index::sample;

use super::{EngineError, SimConfig, UidAssignment};
use crate::metrics;
use crate::rng::{Purpose, RandomSource};
use crate::tokens::{NodeId, TokenSet, Uid};

/// Global simulation state visible to predicates and metrics.
#[derive(Debug, Clone)]
pub struct World {
    uid_space: u32,
    uids: Vec<Uid>,
    node_of_uid: Vec<Option<NodeId>>,
    pub(crate) tokens: Vec<TokenSet>,
    k: usize,
}

impl World {
    pub(crate) fn new(config: &SimConfig, initial: Vec<TokenSet>) -> Result<Self, EngineError> {
        if initial.len() != config.n {
            return Err(EngineError::Config(format!(
                "{} initial token sets for {} nodes",
                initial.len(),
                config.n
            )));
        }
        if let Some(s) = initial.iter().find(|s| s.universe() != config.uid_space) {
            return Err(EngineError::Config(format!(
                "token set over [1, {}] does not match N = {}",
                s.universe(),
                config.uid_space
            )));
        }
        let uids = assign_uids(config);
        let mut node_of_uid = vec![None; config.uid_space as usize + 1];
        for (node, uid) in uids.iter().enumerate() {
            node_of_uid[uid.0 as usize] = Some(node);
        }
        let mut all = TokenSet::empty(config.uid_space);
        for s in &initial {
            all.union_with(s);
        }
        Ok(Self {
            uid_space: config.uid_space,
            uids,
            node_of_uid,
            tokens: initial,
            k: all.len(),
        })
    }

    pub fn n(&self) -> usize {
        self.uids.len()
    }

    pub fn uid_space(&self) -> u32 {
        self.uid_space
    }

    /// Number of distinct tokens in the system.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn uid(&self, node: NodeId) -> Uid {
        self.uids[node]
    }

    pub fn uids(&self) -> &[Uid] {
        &self.uids
    }

    pub fn node_of(&self, uid: Uid) -> Option<NodeId> {
        self.node_of_uid.get(uid.0 as usize).copied().flatten()
    }

    pub fn tokens(&self, node: NodeId) -> &TokenSet {
        &self.tokens[node]
    }

    pub fn token_sets(&self) -> &[TokenSet] {
        &self.tokens
    }

    pub fn potential(&self) -> u64 {
        metrics::potential(&self.tokens, self.k)
    }

    pub fn is_gossip_complete(&self) -> bool {
        metrics::is_gossip_complete(&self.tokens, self.k)
    }
}

fn assign_uids(config: &SimConfig) -> Vec<Uid> {
    match config.uid_assignment {
        UidAssignment::Sequential => (1..=config.n as u32).map(Uid).collect(),
        UidAssignment::RandomInjection => {
            let mut rng = RandomSource::new(config.seed).global(Purpose::Uids, 0);
            sample(&mut rng, config.uid_space as usize, config.n)
                .into_iter()
                .map(|i| Uid(i as u32 + 1))
                .collect()
        }
    }
}

/// Token placements keyed by node index: each listed node starts with the
/// token labeled by its own UID.
pub fn own_tokens(config: &SimConfig, holders: impl IntoIterator<Item = NodeId>) -> Vec<TokenSet> {
    let uids = assign_uids(config);
    let mut sets = vec![TokenSet::empty(config.uid_space); config.n];
    for node in holders {
        sets[node].insert(uids[node]);
    }
    sets
}
