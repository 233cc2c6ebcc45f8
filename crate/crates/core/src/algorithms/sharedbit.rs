use crate::engine::{Action, EngineError, Link, Neighbor, NodeBehavior, NodeCtx, NodeView, Tag};
use crate::randomness::{Group, SharedString};
use crate::tokens::{TokenSet, Uid};

/// The SharedBit tag: parity of the round's bits over the node's tokens,
/// 0 for an empty set.
pub fn sharedbit_tag(group: &Group, tokens: &TokenSet) -> bool {
    tokens.iter().fold(false, |acc, t| acc ^ group.token_bit(t))
}

/// Group used in round `r` when the string is recycled after `groups`.
pub(crate) fn wrapped_group(round: u64, groups: u64) -> (u64, u64) {
    ((round - 1) % groups + 1, (round - 1) / groups)
}

/// The proposal rule shared by SharedBit and SimSharedBit: a tag-1 node
/// proposes to one of its tag-0 neighbors, chosen with its own bundle bits.
pub(crate) fn sharedbit_action(group: &Group, uid: Uid, tag: bool, view: &NodeView<'_>) -> Action {
    if !tag {
        return Action::Listen;
    }
    let zeros: Vec<&Neighbor> = view
        .neighbors
        .iter()
        .filter(|nb| !nb.tag.low_bit())
        .collect();
    if zeros.is_empty() {
        return Action::Listen;
    }
    Action::Propose(zeros[group.proposal_choice(uid, zeros.len())].uid)
}

pub(crate) fn require_tag_bit(ctx: &NodeCtx<'_>, name: &str) -> Result<(), EngineError> {
    if ctx.config.tag_bits < 1 {
        return Err(EngineError::Config(format!("{name} needs b >= 1")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SharedBitState {
    /// Bit advertised in the current round.
    pub tag: bool,
}

/// All nodes read the same [`SharedString`]. Past its last group the string
/// is recycled from group 1; [`SharedBit::wraps`] counts how often.
#[derive(Debug, Clone)]
pub struct SharedBit {
    string: SharedString,
    group: Option<Group>,
    wraps: u64,
}

impl SharedBit {
    pub fn new(string: SharedString) -> Self {
        Self {
            string,
            group: None,
            wraps: 0,
        }
    }

    pub fn string(&self) -> &SharedString {
        &self.string
    }

    pub fn wraps(&self) -> u64 {
        self.wraps
    }

    fn group(&self) -> &Group {
        self.group.as_ref().expect("begin_round runs before tags")
    }
}

impl NodeBehavior for SharedBit {
    type State = SharedBitState;

    fn init_node(&mut self, ctx: &NodeCtx<'_>) -> Result<SharedBitState, EngineError> {
        require_tag_bit(ctx, "SharedBit")?;
        if self.string.uid_space() != ctx.config.uid_space {
            return Err(EngineError::Config(format!(
                "shared string is over N = {}, config has N = {}",
                self.string.uid_space(),
                ctx.config.uid_space
            )));
        }
        Ok(SharedBitState::default())
    }

    fn begin_round(&mut self, round: u64) -> Result<(), EngineError> {
        let (g, wraps) = wrapped_group(round, self.string.groups());
        self.wraps = wraps;
        self.group = Some(
            self.string
                .group(g)
                .map_err(|e| EngineError::Behavior(e.to_string()))?,
        );
        Ok(())
    }

    fn choose_tag(&self, ctx: &NodeCtx<'_>, state: &mut SharedBitState) -> Tag {
        state.tag = sharedbit_tag(self.group(), ctx.tokens);
        Tag::bit(state.tag, ctx.config.tag_bits)
    }

    fn choose_action(
        &self,
        ctx: &NodeCtx<'_>,
        state: &mut SharedBitState,
        view: &NodeView<'_>,
    ) -> Action {
        sharedbit_action(self.group(), ctx.uid, state.tag, view)
    }

    fn on_connect(&self, link: &mut Link<'_, SharedBitState>) -> Result<(), EngineError> {
        link.transfer()?;
        Ok(())
    }
}
