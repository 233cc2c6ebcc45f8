//! CrowdedBin: gossip without knowing `k`.
//!
//! Every token holder draws a random ℓ-bit tag. Instance `j` guesses
//! `k ≈ 2^j`: each holder drops its tag into one of `2^j` bins, and nodes
//! spell the tags they know bin by bin, one tag per block, learning the tags
//! spelled by their neighbors. After each spelled tag, the nodes holding that
//! tag's token run a few PPUSH rounds to deliver it. A node that sees a bin
//! with `γ·log2 N` tags, or hears activity on a higher instance, raises its
//! estimate, but only once its current phase has finished.

mod goodness;
mod schedule;

pub use goodness::{is_good_configuration, Goodness};
pub use schedule::{instance_position, schedule_map, Layout, Position, Segment};

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sharedbit::require_tag_bit;
use crate::engine::{
    Action, EngineError, Link, Neighbor, NodeBehavior, NodeCtx, NodeView, Side, Tag,
};
use crate::rng::Purpose;
use crate::tokens::TokenId;
use crate::transfer::log2_ceil;

/// Protocol constants. `confidence` is the exponent `c` of the target
/// failure probability `N^-c`; it fixes the minimum `beta` and `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrowdedBinParams {
    pub beta: u32,
    pub gamma: u32,
    pub confidence: u32,
}

impl Default for CrowdedBinParams {
    fn default() -> Self {
        Self {
            beta: 4,
            gamma: 12,
            confidence: 1,
        }
    }
}

impl CrowdedBinParams {
    /// Tag length `ℓ = β·log2 N`.
    pub fn tag_len(&self, log_n: u32) -> u32 {
        self.beta * log_n
    }

    /// Tags a bin must hold to count as crowded, `γ·log2 N`.
    pub fn crowd_threshold(&self, log_n: u32) -> usize {
        self.gamma as usize * log_n as usize
    }

    /// Checks `β >= c + 3`, `γ >= 3c + 9`, and that tags fit in a machine word.
    pub fn validate(&self, log_n: u32) -> Result<(), String> {
        let c = self.confidence;
        if self.beta < c + 3 {
            return Err(format!("beta = {} is below c + 3 = {}", self.beta, c + 3));
        }
        if self.gamma < 3 * c + 9 {
            return Err(format!(
                "gamma = {} is below 3c + 9 = {}",
                self.gamma,
                3 * c + 9
            ));
        }
        self.validate_tag_len(log_n)
    }

    fn validate_tag_len(&self, log_n: u32) -> Result<(), String> {
        let l = self.tag_len(log_n);
        if l == 0 || l > 63 {
            return Err(format!("tag length beta * log2 N = {l} must lie in 1..=63"));
        }
        Ok(())
    }
}

/// Per-node CrowdedBin state.
#[derive(Debug, Clone)]
pub struct CrowdedBinState {
    token: Option<TokenId>,
    tag: Option<u64>,
    /// Bin choice per instance (1-based), for token holders.
    bins: Vec<u64>,
    est: u32,
    pending: u32,
    /// `(instance, phase)` the node committed to.
    latch: Option<(u32, u64)>,
    /// `sets[j - 1][bin - 1]`: tags known for that bin of instance `j`.
    sets: Vec<Vec<BTreeSet<u64>>>,
    staged: BTreeSet<u64>,
    heard: Vec<u64>,
    /// Token to tag, for every token received with its label.
    labels: BTreeMap<TokenId, u64>,
    token_of_tag: BTreeMap<u64, TokenId>,
    now: Option<(u32, Position)>,
    push: Option<(TokenId, u64)>,
    crowded_at_max: u64,
}

impl CrowdedBinState {
    pub fn est(&self) -> u32 {
        self.est
    }

    pub fn latch(&self) -> Option<(u32, u64)> {
        self.latch
    }

    pub fn tag(&self) -> Option<u64> {
        self.tag
    }

    pub fn token(&self) -> Option<TokenId> {
        self.token
    }

    /// Bin per instance, for token holders.
    pub fn bins(&self) -> &[u64] {
        &self.bins
    }

    pub fn bin_set(&self, instance: u32, bin: u64) -> &BTreeSet<u64> {
        &self.sets[instance as usize - 1][bin as usize - 1]
    }

    pub fn label(&self, token: TokenId) -> Option<u64> {
        self.labels.get(&token).copied()
    }

    /// Crowded bins seen while already at the largest instance.
    pub fn crowded_at_max(&self) -> u64 {
        self.crowded_at_max
    }

    fn upgrade(&mut self, to: u32) {
        if self.latch.is_some() {
            self.pending = self.pending.max(to);
        } else {
            self.est = self.est.max(to);
        }
    }
}

#[derive(Debug, Clone)]
pub struct CrowdedBin {
    params: CrowdedBinParams,
    checked: bool,
    log_n: u32,
    layouts: Vec<Layout>,
}

impl CrowdedBin {
    /// Rejects constants below the confidence thresholds at init.
    pub fn new(params: CrowdedBinParams) -> Self {
        Self {
            params,
            checked: true,
            log_n: 0,
            layouts: Vec::new(),
        }
    }

    /// Accepts any constants, for exercising estimate upgrades at small
    /// scale.
    pub fn unchecked(params: CrowdedBinParams) -> Self {
        Self {
            checked: false,
            ..Self::new(params)
        }
    }

    pub fn params(&self) -> &CrowdedBinParams {
        &self.params
    }

    fn tag_len(&self) -> u32 {
        self.params.tag_len(self.log_n)
    }

    fn spelled(&self, state: &CrowdedBinState, j: u32, pos: &Position) -> Option<u64> {
        state.sets[j as usize - 1][pos.bin as usize - 1]
            .iter()
            .nth(pos.block as usize - 1)
            .copied()
    }

    fn participating(state: &CrowdedBinState, j: u32) -> bool {
        state.latch.is_some_and(|(i, _)| i == j)
    }
}

impl NodeBehavior for CrowdedBin {
    type State = CrowdedBinState;

    fn init_node(&mut self, ctx: &NodeCtx<'_>) -> Result<CrowdedBinState, EngineError> {
        require_tag_bit(ctx, "CrowdedBin")?;
        let log_n = log2_ceil(ctx.config.uid_space as u64);
        let check = if self.checked {
            self.params.validate(log_n)
        } else {
            self.params.validate_tag_len(log_n)
        };
        check.map_err(EngineError::Config)?;
        if ctx.config.bit_cap < self.params.tag_len(log_n) as usize {
            return Err(EngineError::Config(format!(
                "CrowdedBin tag labels need {} bits, bit_cap is {}",
                self.params.tag_len(log_n),
                ctx.config.bit_cap
            )));
        }
        if ctx.tokens.len() > 1 {
            return Err(EngineError::Config(format!(
                "CrowdedBin allows at most one starting token per node, node {} holds {}",
                ctx.node,
                ctx.tokens.len()
            )));
        }
        if self.layouts.is_empty() {
            self.log_n = log_n;
            self.layouts = (1..=log_n)
                .map(|j| Layout::new(1 << j, &self.params, log_n))
                .collect();
        }

        let mut sets: Vec<Vec<BTreeSet<u64>>> =
            (1..=log_n).map(|j| vec![BTreeSet::new(); 1 << j]).collect();
        let mut labels = BTreeMap::new();
        let mut token_of_tag = BTreeMap::new();
        let token = ctx.tokens.iter().next();
        let (mut tag, mut bins) = (None, Vec::new());
        if let Some(t) = token {
            let mut rng = ctx.stream(Purpose::Init);
            let x = rng.gen_range(1..(1u64 << self.tag_len()));
            bins = (1..=log_n).map(|j| rng.gen_range(1..=1u64 << j)).collect();
            for (j, &b) in bins.iter().enumerate() {
                sets[j][b as usize - 1].insert(x);
            }
            labels.insert(t, x);
            token_of_tag.insert(x, t);
            tag = Some(x);
        }
        Ok(CrowdedBinState {
            token,
            tag,
            bins,
            est: 1,
            pending: 1,
            latch: None,
            sets,
            staged: BTreeSet::new(),
            heard: Vec::new(),
            labels,
            token_of_tag,
            now: None,
            push: None,
            crowded_at_max: 0,
        })
    }

    fn choose_tag(&self, ctx: &NodeCtx<'_>, st: &mut CrowdedBinState) -> Tag {
        let (j, i) = schedule_map(ctx.round, self.log_n);
        let layout = &self.layouts[j as usize - 1];
        let pos = layout.position(i);
        st.now = Some((j, pos));
        st.push = None;
        if st.latch.is_none() && j == st.est && layout.is_phase_start(&pos) {
            st.latch = Some((j, pos.phase));
        }
        let mut bit = false;
        if Self::participating(st, j) {
            let spelled = self.spelled(st, j, &pos);
            match pos.segment {
                Segment::TagBit(o) => {
                    bit = spelled.is_some_and(|t| (t >> (self.tag_len() - o)) & 1 == 1);
                }
                Segment::PpushRound(_) => {
                    if let Some(t) = spelled {
                        if let Some(&token) = st.token_of_tag.get(&t) {
                            if ctx.tokens.contains(token) {
                                bit = true;
                                st.push = Some((token, t));
                            }
                        }
                    }
                }
            }
        }
        Tag::bit(bit, ctx.config.tag_bits)
    }

    fn choose_action(
        &self,
        ctx: &NodeCtx<'_>,
        st: &mut CrowdedBinState,
        view: &NodeView<'_>,
    ) -> Action {
        let (j, pos) = st.now.expect("choose_tag runs first");
        let layout = &self.layouts[j as usize - 1];
        if j > st.est && view.neighbors.iter().any(|nb| nb.tag.low_bit()) {
            st.upgrade(j);
        }
        if !Self::participating(st, j) {
            return Action::Listen;
        }

        if let Segment::TagBit(o) = pos.segment {
            if st.heard.len() != view.neighbors.len() {
                st.heard = vec![0; view.neighbors.len()];
            }
            for (acc, nb) in st.heard.iter_mut().zip(view.neighbors) {
                *acc = (*acc << 1) | nb.tag.low_bit() as u64;
            }
            if o == self.tag_len() {
                for acc in st.heard.iter_mut() {
                    if *acc != 0 {
                        st.staged.insert(*acc);
                    }
                    *acc = 0;
                }
            }
        }
        if layout.is_bin_end(&pos) {
            let set = &mut st.sets[j as usize - 1][pos.bin as usize - 1];
            set.append(&mut st.staged);
            if set.len() >= self.params.crowd_threshold(self.log_n) {
                if j < self.log_n {
                    st.upgrade(j + 1);
                } else {
                    st.crowded_at_max += 1;
                }
            }
        }
        if layout.is_phase_end(&pos) {
            st.latch = None;
            st.est = st.est.max(st.pending);
        }

        if st.push.is_none() {
            return Action::Listen;
        }
        let uninformed: Vec<&Neighbor> = view
            .neighbors
            .iter()
            .filter(|nb| !nb.tag.low_bit())
            .collect();
        match uninformed.choose(&mut ctx.stream(Purpose::Action)) {
            Some(nb) => Action::Propose(nb.uid),
            None => Action::Listen,
        }
    }

    fn on_connect(&self, link: &mut Link<'_, CrowdedBinState>) -> Result<(), EngineError> {
        let Some((token, tag)) = link.proposer.state.push else {
            return Ok(());
        };
        link.spend_bits(self.tag_len() as usize)?;
        link.send_token(Side::Proposer, token)?;
        let st = &mut *link.acceptor.state;
        st.labels.entry(token).or_insert(tag);
        st.token_of_tag.entry(tag).or_insert(token);
        Ok(())
    }
}

/// Tag and bin choices of every token holder, in node order, from states
/// after initialization.
pub fn configuration(states: &[CrowdedBinState]) -> (Vec<u64>, Vec<Vec<u64>>) {
    states
        .iter()
        .filter_map(|s| s.tag.map(|t| (t, s.bins.clone())))
        .unzip()
}
