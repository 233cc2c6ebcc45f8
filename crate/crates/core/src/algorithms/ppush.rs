use rand::seq::SliceRandom;

use super::sharedbit::require_tag_bit;
use crate::engine::{
    Action, EngineError, Link, Neighbor, NodeBehavior, NodeCtx, NodeView, Side, Tag,
};
use crate::rng::Purpose;
use crate::tokens::TokenId;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PpushState {
    /// Whether the node holds the rumor. Never reset.
    pub informed: bool,
}

/// Rumor spreading: informed nodes advertise 1 and propose to a uniformly
/// random neighbor advertising 0; uninformed nodes advertise 0 and listen.
#[derive(Debug, Clone, Copy)]
pub struct Ppush {
    rumor: TokenId,
}

impl Ppush {
    pub fn new(rumor: TokenId) -> Self {
        Self { rumor }
    }

    pub fn rumor(&self) -> TokenId {
        self.rumor
    }
}

impl NodeBehavior for Ppush {
    type State = PpushState;

    fn init_node(&mut self, ctx: &NodeCtx<'_>) -> Result<PpushState, EngineError> {
        require_tag_bit(ctx, "PPUSH")?;
        if let Some(t) = ctx.tokens.iter().find(|&t| t != self.rumor) {
            return Err(EngineError::Config(format!(
                "PPUSH spreads the single rumor {}, but node {} starts with token {t}",
                self.rumor, ctx.node
            )));
        }
        Ok(PpushState {
            informed: ctx.tokens.contains(self.rumor),
        })
    }

    fn choose_tag(&self, ctx: &NodeCtx<'_>, state: &mut PpushState) -> Tag {
        state.informed |= ctx.tokens.contains(self.rumor);
        Tag::bit(state.informed, ctx.config.tag_bits)
    }

    fn choose_action(
        &self,
        ctx: &NodeCtx<'_>,
        state: &mut PpushState,
        view: &NodeView<'_>,
    ) -> Action {
        if !state.informed {
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

    fn on_connect(&self, link: &mut Link<'_, PpushState>) -> Result<(), EngineError> {
        if link.proposer.state.informed && !link.acceptor.state.informed {
            link.send_token(Side::Proposer, self.rumor)?;
            link.acceptor.state.informed = true;
        }
        Ok(())
    }
}
