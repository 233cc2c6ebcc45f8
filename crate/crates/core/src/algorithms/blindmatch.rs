use rand::seq::SliceRandom;
use rand::Rng;

use crate::engine::{Action, EngineError, Link, NodeBehavior, NodeCtx, NodeView, Tag};
use crate::rng::Purpose;

/// Each round a node flips a fair coin: heads proposes to a uniformly random
/// neighbor, tails listens. Connected pairs run one transfer. Tags are
/// ignored (all zeros), so any `b >= 0` works.
#[derive(Debug, Clone, Copy, Default)]
pub struct BlindMatch;

impl NodeBehavior for BlindMatch {
    type State = ();

    fn init_node(&mut self, _ctx: &NodeCtx<'_>) -> Result<(), EngineError> {
        Ok(())
    }

    fn choose_tag(&self, ctx: &NodeCtx<'_>, _state: &mut ()) -> Tag {
        Tag::zeros(ctx.config.tag_bits)
    }

    fn choose_action(&self, ctx: &NodeCtx<'_>, _state: &mut (), view: &NodeView<'_>) -> Action {
        let mut rng = ctx.stream(Purpose::Action);
        if !rng.gen::<bool>() {
            return Action::Listen;
        }
        match view.neighbors.choose(&mut rng) {
            Some(nb) => Action::Propose(nb.uid),
            None => Action::Listen,
        }
    }

    fn on_connect(&self, link: &mut Link<'_, ()>) -> Result<(), EngineError> {
        link.transfer()?;
        Ok(())
    }
}
