use std::sync::Arc;

use super::link::{Link, TokenMove};
use super::resolve::resolve_connections;
use super::world::World;
use super::{Action, EngineError, Neighbor, NodeBehavior, NodeCtx, NodeView, SimConfig, Tag};
use crate::graph::{DynamicTopology, StaticTopology};
use crate::rng::RandomSource;
use crate::tokens::{NodeId, TokenSet};
use crate::transfer::TransferParams;

/// Everything observable about one executed round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundOutcome {
    pub round: u64,
    /// Tag advertised by each node.
    pub tags: Vec<Tag>,
    /// `(proposer, target)`, ascending by proposer.
    pub proposals: Vec<(NodeId, NodeId)>,
    /// `(proposer, acceptor)`, ascending by acceptor.
    pub matching: Vec<(NodeId, NodeId)>,
    /// Control bits used by each connection, parallel to `matching`.
    pub bits_used: Vec<usize>,
    /// Tokens that were new to their receiver.
    pub transfers: Vec<TokenMove>,
    pub phi_before: u64,
    pub phi_after: u64,
}

impl RoundOutcome {
    /// Matching validity and proposer exclusion.
    pub fn check_invariants(&self, n: usize) -> Result<(), String> {
        let mut busy = vec![false; n];
        let mut proposer = vec![false; n];
        for &(p, _) in &self.proposals {
            proposer[p] = true;
        }
        for &(p, a) in &self.matching {
            if proposer[a] {
                return Err(format!("node {a} accepted although it proposed"));
            }
            if !self.proposals.contains(&(p, a)) {
                return Err(format!("pair {p}-{a} was never proposed"));
            }
            for x in [p, a] {
                if std::mem::replace(&mut busy[x], true) {
                    return Err(format!("node {x} is in more than one connection"));
                }
            }
        }
        if self.phi_after > self.phi_before {
            return Err(format!(
                "potential increased from {} to {}",
                self.phi_before, self.phi_after
            ));
        }
        Ok(())
    }
}

/// Drives one trial round by round.
pub struct Engine<'t, B: NodeBehavior> {
    config: SimConfig,
    behavior: B,
    topology: &'t DynamicTopology,
    rng: RandomSource,
    params: TransferParams,
    world: World,
    states: Vec<B::State>,
    round: u64,
    current: Option<(u64, Arc<StaticTopology>)>,
    view_buf: Vec<Neighbor>,
}

fn pair_mut<T>(items: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = items.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = items.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

impl<'t, B: NodeBehavior> Engine<'t, B> {
    pub fn new(
        config: SimConfig,
        mut behavior: B,
        topology: &'t DynamicTopology,
        initial: Vec<TokenSet>,
    ) -> Result<Self, EngineError> {
        config.validate()?;
        if topology.n() != config.n {
            return Err(EngineError::Config(format!(
                "topology has {} nodes, config has n = {}",
                topology.n(),
                config.n
            )));
        }
        let report = topology.validate_stability();
        if !report.ok {
            return Err(EngineError::Config(format!(
                "topology is not tau-stable: {}",
                report.reasons.join("; ")
            )));
        }
        let params = config.transfer_params()?;
        let rng = RandomSource::new(config.seed);
        let world = World::new(&config, initial)?;
        let mut states = Vec::with_capacity(config.n);
        for node in 0..config.n {
            let ctx = NodeCtx {
                node,
                uid: world.uid(node),
                round: 0,
                tokens: world.tokens(node),
                config: &config,
                rng: &rng,
            };
            states.push(behavior.init_node(&ctx)?);
        }
        Ok(Self {
            config,
            behavior,
            topology,
            rng,
            params,
            world,
            states,
            round: 0,
            current: None,
            view_buf: Vec::new(),
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn states(&self) -> &[B::State] {
        &self.states
    }

    pub fn behavior(&self) -> &B {
        &self.behavior
    }

    /// Last executed round (0 before the first step).
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn topology(&self) -> &DynamicTopology {
        self.topology
    }

    fn graph_for(&mut self, round: u64) -> Result<Arc<StaticTopology>, EngineError> {
        let epoch = self.topology.epoch_of(round);
        match &self.current {
            Some((e, g)) if *e == epoch => Ok(g.clone()),
            _ => {
                let g = self.topology.snapshot_for_round(round)?;
                if !g.is_connected() {
                    return Err(EngineError::Invariant {
                        round,
                        detail: "topology snapshot is disconnected".into(),
                    });
                }
                self.current = Some((epoch, g.clone()));
                Ok(g)
            }
        }
    }

    /// Executes the next round.
    pub fn step(&mut self) -> Result<RoundOutcome, EngineError> {
        let round = self.round + 1;
        let graph = self.graph_for(round)?;
        let n = self.config.n;
        let phi_before = self.world.potential();
        self.behavior.begin_round(round)?;

        let mut tags = Vec::with_capacity(n);
        for node in 0..n {
            let ctx = NodeCtx {
                node,
                uid: self.world.uid(node),
                round,
                tokens: self.world.tokens(node),
                config: &self.config,
                rng: &self.rng,
            };
            let tag = self.behavior.choose_tag(&ctx, &mut self.states[node]);
            if tag.len() != self.config.tag_bits {
                return Err(EngineError::TagLength {
                    node,
                    expected: self.config.tag_bits,
                    got: tag.len(),
                });
            }
            tags.push(tag);
        }

        let mut proposals = Vec::new();
        let mut listening = vec![false; n];
        for (node, listens) in listening.iter_mut().enumerate() {
            self.view_buf.clear();
            self.view_buf
                .extend(graph.neighbors(node).iter().map(|&v| Neighbor {
                    uid: self.world.uid(v),
                    tag: tags[v],
                }));
            self.view_buf.sort_unstable_by_key(|nb| nb.uid);
            let ctx = NodeCtx {
                node,
                uid: self.world.uid(node),
                round,
                tokens: self.world.tokens(node),
                config: &self.config,
                rng: &self.rng,
            };
            let view = NodeView {
                uid: ctx.uid,
                neighbors: &self.view_buf,
            };
            match self
                .behavior
                .choose_action(&ctx, &mut self.states[node], &view)
            {
                Action::Listen => *listens = true,
                Action::Propose(uid) => {
                    let target = self
                        .world
                        .node_of(uid)
                        .filter(|&t| graph.has_edge(node, t))
                        .ok_or(EngineError::MalformedProposal {
                            round,
                            proposer: node,
                            target: uid,
                        })?;
                    proposals.push((node, target));
                }
            }
        }

        let matching = resolve_connections(&proposals, &listening, &self.rng, round)?;

        let mut bits_used = Vec::with_capacity(matching.len());
        let mut transfers = Vec::new();
        for &(p, a) in &matching {
            let (up, ua) = (self.world.uid(p), self.world.uid(a));
            let (tp, ta) = pair_mut(&mut self.world.tokens, p, a);
            let (sp, sa) = pair_mut(&mut self.states, p, a);
            let mut link = Link::new(
                round,
                (p, up, tp, sp),
                (a, ua, ta, sa),
                self.config.bit_cap,
                self.config.token_cap,
                &self.rng,
                &self.params,
            );
            self.behavior.on_connect(&mut link)?;
            let (bits, moves) = link.into_moves();
            bits_used.push(bits);
            transfers.extend(moves);
        }

        let phi_after = self.world.potential();
        let outcome = RoundOutcome {
            round,
            tags,
            proposals,
            matching,
            bits_used,
            transfers,
            phi_before,
            phi_after,
        };
        outcome
            .check_invariants(n)
            .map_err(|detail| EngineError::Invariant { round, detail })?;
        self.round = round;
        Ok(outcome)
    }
}
