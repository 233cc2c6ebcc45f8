//! Synchronous rounds of the mobile telephone model.
//!
//! Each round every node advertises a `b`-bit tag, sees its neighbors' UIDs
//! and tags, and either proposes to one neighbor or listens. Every listener
//! with incoming proposals accepts one uniformly at random; a node that
//! proposed cannot accept. Connected pairs then talk under a per-connection
//! budget of tokens and control bits.
//!
//! Node logic plugs in through [`NodeBehavior`]; the engine owns the token
//! sets so that tokens move only through a metered [`Link`].

mod link;
mod resolve;
mod round;
mod trial;
mod world;

pub use link::{Endpoint, Link, Side, TokenMove};
pub use resolve::resolve_connections;
pub use round::{Engine, RoundOutcome};
pub use trial::{run_trial, TrialRecord};
pub use world::{own_tokens, World};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GraphError;
use crate::rng::{Purpose, RandomSource};
use crate::tokens::{NodeId, TokenId, TokenSet, Uid};
use crate::transfer::{TransferError, TransferParams};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("node {node} chose a tag of {got} bits, expected {expected}")]
    TagLength { node: NodeId, expected: u8, got: u8 },
    #[error(
        "round {round}: node {proposer} proposed to {target}, which is not a current neighbor"
    )]
    MalformedProposal {
        round: u64,
        proposer: NodeId,
        target: Uid,
    },
    #[error("round {round}: connection {a}-{b} exceeded its {what} budget ({used} > {cap})")]
    BudgetExceeded {
        round: u64,
        a: NodeId,
        b: NodeId,
        what: &'static str,
        used: usize,
        cap: usize,
    },
    #[error("round {round}: node {node} tried to send token {token} it does not hold")]
    NotHolder {
        round: u64,
        node: NodeId,
        token: TokenId,
    },
    #[error("engine invariant violated in round {round}: {detail}")]
    Invariant { round: u64, detail: String },
    #[error("behavior error: {0}")]
    Behavior(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
}

/// A `b`-bit advertisement, stored in the low bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Tag {
    bits: u64,
    len: u8,
}

impl Tag {
    pub fn new(bits: u64, len: u8) -> Self {
        assert!(len <= 64);
        let mask = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        Self {
            bits: bits & mask,
            len,
        }
    }

    /// A tag carrying one bit in the low position, zero-padded to `len`.
    pub fn bit(value: bool, len: u8) -> Self {
        Self::new(value as u64 * (len > 0) as u64, len)
    }

    pub fn zeros(len: u8) -> Self {
        Self::new(0, len)
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn len(self) -> u8 {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    /// The low bit; false for empty tags.
    pub fn low_bit(self) -> bool {
        self.bits & 1 == 1
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UidAssignment {
    /// Node `i` gets UID `i + 1`.
    #[default]
    Sequential,
    /// A seeded random injection `[n] -> [N]`.
    RandomInjection,
}

/// Per-trial engine parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// `N`, a power of two with `N >= n`.
    pub uid_space: u32,
    pub n: usize,
    /// `b`, the tag length.
    pub tag_bits: u8,
    pub token_cap: usize,
    pub bit_cap: usize,
    pub max_rounds: u64,
    pub seed: u64,
    pub uid_assignment: UidAssignment,
    /// Error bound handed to the transfer subroutine.
    pub transfer_epsilon: f64,
}

/// Default transfer error exponent: `ε_t = n^{-2}`.
pub const DEFAULT_TRANSFER_EXPONENT: i32 = 2;

impl SimConfig {
    /// Defaults: one token per connection, `ε_t = n^-2`, and a bit cap equal
    /// to the worst-case cost of one transfer at that error bound.
    pub fn new(n: usize, uid_space: u32, tag_bits: u8, seed: u64) -> Self {
        let transfer_epsilon = (n.max(2) as f64).powi(-DEFAULT_TRANSFER_EXPONENT);
        let bit_cap = TransferParams::new(uid_space.max(2), transfer_epsilon)
            .map(|p| p.bit_bound())
            .unwrap_or(1);
        Self {
            uid_space,
            n,
            tag_bits,
            token_cap: 1,
            bit_cap,
            max_rounds: 100_000,
            seed,
            uid_assignment: UidAssignment::Sequential,
            transfer_epsilon,
        }
    }

    pub fn with_max_rounds(mut self, max_rounds: u64) -> Self {
        self.max_rounds = max_rounds;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_uid_assignment(mut self, a: UidAssignment) -> Self {
        self.uid_assignment = a;
        self
    }

    /// Sets the transfer error bound and resizes the bit cap to match.
    pub fn with_transfer_epsilon(mut self, eps: f64) -> Self {
        self.transfer_epsilon = eps;
        if let Ok(p) = TransferParams::new(self.uid_space.max(2), eps) {
            self.bit_cap = p.bit_bound();
        }
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        let err = |m: String| Err(EngineError::Config(m));
        if self.n < 2 {
            return err(format!("n must be >= 2, got {}", self.n));
        }
        if !self.uid_space.is_power_of_two() {
            return err(format!("N must be a power of two, got {}", self.uid_space));
        }
        if (self.uid_space as usize) < self.n {
            return err(format!(
                "N = {} is smaller than n = {}",
                self.uid_space, self.n
            ));
        }
        if self.tag_bits > 64 {
            return err(format!("tag length {} exceeds 64 bits", self.tag_bits));
        }
        if self.token_cap < 1 {
            return err("token_cap must be >= 1".into());
        }
        if self.bit_cap < 1 {
            return err("bit_cap must be >= 1".into());
        }
        self.transfer_params()?;
        Ok(())
    }

    pub fn transfer_params(&self) -> Result<TransferParams, TransferError> {
        TransferParams::new(self.uid_space, self.transfer_epsilon)
    }
}

/// What a node sees after tags are chosen.
#[derive(Debug, Clone, Copy)]
pub struct NodeView<'a> {
    pub uid: Uid,
    /// Sorted by UID.
    pub neighbors: &'a [Neighbor],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub uid: Uid,
    pub tag: Tag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Listen,
    Propose(Uid),
}

/// Read-only per-node context for behavior callbacks.
#[derive(Clone, Copy)]
pub struct NodeCtx<'a> {
    pub node: NodeId,
    pub uid: Uid,
    /// Round being executed; 0 during initialization.
    pub round: u64,
    pub tokens: &'a TokenSet,
    pub config: &'a SimConfig,
    rng: &'a RandomSource,
}

impl<'a> NodeCtx<'a> {
    pub fn stream(&self, purpose: Purpose) -> rand_chacha::ChaCha8Rng {
        if self.round == 0 {
            self.rng.node(self.node, purpose)
        } else {
            self.rng.node_round(self.node, self.round, purpose)
        }
    }
}

/// Node logic driven by the engine.
///
/// Within a round the engine calls `begin_round` once, then `choose_tag` for
/// every node, then `choose_action` for every node (each seeing the same tag
/// snapshot), then `on_connect` once per connected pair.
pub trait NodeBehavior {
    type State;

    fn init_node(&mut self, ctx: &NodeCtx<'_>) -> Result<Self::State, EngineError>;

    fn begin_round(&mut self, _round: u64) -> Result<(), EngineError> {
        Ok(())
    }

    fn choose_tag(&self, ctx: &NodeCtx<'_>, state: &mut Self::State) -> Tag;

    fn choose_action(
        &self,
        ctx: &NodeCtx<'_>,
        state: &mut Self::State,
        view: &NodeView<'_>,
    ) -> Action;

    fn on_connect(&self, link: &mut Link<'_, Self::State>) -> Result<(), EngineError>;
}
