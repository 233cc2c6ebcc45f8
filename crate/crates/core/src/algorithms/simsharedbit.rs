use rand::seq::SliceRandom;
use rand::Rng;

use super::sharedbit::{require_tag_bit, sharedbit_action, sharedbit_tag, wrapped_group};
use crate::engine::{Action, EngineError, Link, NodeBehavior, NodeCtx, NodeView, Tag};
use crate::randomness::{Group, Seed, SharedString};
use crate::rng::Purpose;
use crate::tokens::Uid;
use crate::transfer::log2_ceil;

/// Per-node state: the smallest UID heard of so far and that node's seed.
#[derive(Debug, Clone)]
pub struct SimSharedBitState {
    candidate: Uid,
    seed: Seed,
    string: SharedString,
    group: Option<(u64, Group)>,
    tag: bool,
    adopted_at: u64,
}

impl SimSharedBitState {
    pub fn candidate(&self) -> Uid {
        self.candidate
    }

    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    /// The string expanded from the current candidate's seed.
    pub fn string(&self) -> &SharedString {
        &self.string
    }

    /// Round in which the current candidate was adopted (0 for the own UID).
    pub fn adopted_at(&self) -> u64 {
        self.adopted_at
    }

    fn adopt(&mut self, candidate: Uid, seed: Seed, round: u64) {
        if candidate < self.candidate {
            self.string = SharedString::from_seed(self.string.uid_space(), &seed)
                .expect("UID space was validated at init");
            self.candidate = candidate;
            self.seed = seed;
            self.group = None;
            self.adopted_at = round;
        }
    }
}

/// SharedBit without a preshared string.
///
/// Every node draws its own seed. Even rounds run coin-flip random matching
/// in which connected pairs swap `(candidate UID, seed)` and both keep the
/// smaller UID, so all candidates converge to the global minimum. Odd round
/// `r` runs SharedBit on group `(r + 1) / 2` of the string expanded from the
/// node's current candidate seed. This flooding replaces a dedicated
/// leader-election routine and carries no bound on its convergence time.
#[derive(Debug, Clone, Copy, Default)]
pub struct SimSharedBit;

impl SimSharedBit {
    /// Control bits of one even-round exchange.
    pub fn exchange_bits(uid_space: u32) -> usize {
        2 * (log2_ceil(uid_space as u64) as usize + Seed::bits_for(uid_space))
    }

    fn group_for(state: &mut SimSharedBitState, round: u64) -> &Group {
        let (g, _) = wrapped_group(round.div_ceil(2), state.string.groups());
        if state.group.as_ref().map(|(x, _)| *x) != Some(g) {
            let group = state.string.group(g).expect("group index is wrapped");
            state.group = Some((g, group));
        }
        &state.group.as_ref().expect("just filled").1
    }
}

impl NodeBehavior for SimSharedBit {
    type State = SimSharedBitState;

    fn init_node(&mut self, ctx: &NodeCtx<'_>) -> Result<SimSharedBitState, EngineError> {
        require_tag_bit(ctx, "SimSharedBit")?;
        let need = Self::exchange_bits(ctx.config.uid_space);
        if ctx.config.bit_cap < need {
            return Err(EngineError::Config(format!(
                "SimSharedBit seed exchange needs {need} bits, bit_cap is {}",
                ctx.config.bit_cap
            )));
        }
        let seed = Seed::random(ctx.config.uid_space, &mut ctx.stream(Purpose::Init));
        let string = SharedString::from_seed(ctx.config.uid_space, &seed)
            .map_err(|e| EngineError::Config(e.to_string()))?;
        Ok(SimSharedBitState {
            candidate: ctx.uid,
            seed,
            string,
            group: None,
            tag: false,
            adopted_at: 0,
        })
    }

    fn choose_tag(&self, ctx: &NodeCtx<'_>, state: &mut SimSharedBitState) -> Tag {
        state.tag = if ctx.round.is_multiple_of(2) {
            false
        } else {
            sharedbit_tag(Self::group_for(state, ctx.round), ctx.tokens)
        };
        Tag::bit(state.tag, ctx.config.tag_bits)
    }

    fn choose_action(
        &self,
        ctx: &NodeCtx<'_>,
        state: &mut SimSharedBitState,
        view: &NodeView<'_>,
    ) -> Action {
        if ctx.round % 2 == 1 {
            let tag = state.tag;
            return sharedbit_action(Self::group_for(state, ctx.round), ctx.uid, tag, view);
        }
        let mut rng = ctx.stream(Purpose::Action);
        if !rng.gen::<bool>() {
            return Action::Listen;
        }
        match view.neighbors.choose(&mut rng) {
            Some(nb) => Action::Propose(nb.uid),
            None => Action::Listen,
        }
    }

    fn on_connect(&self, link: &mut Link<'_, SimSharedBitState>) -> Result<(), EngineError> {
        if link.round % 2 == 1 {
            link.transfer()?;
            return Ok(());
        }
        let uid_space = link.proposer.state.string.uid_space();
        link.spend_bits(Self::exchange_bits(uid_space))?;
        let round = link.round;
        let p = (
            link.proposer.state.candidate,
            link.proposer.state.seed.clone(),
        );
        let a = (
            link.acceptor.state.candidate,
            link.acceptor.state.seed.clone(),
        );
        link.proposer.state.adopt(a.0, a.1, round);
        link.acceptor.state.adopt(p.0, p.1, round);
        Ok(())
    }
}
