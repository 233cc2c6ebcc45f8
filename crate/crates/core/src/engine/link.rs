use rand_chacha::ChaCha8Rng;

use super::EngineError;
use crate::rng::{Purpose, RandomSource};
use crate::tokens::{NodeId, TokenId, TokenSet, Uid};
use crate::transfer::{self, Direction, TransferOutcome, TransferParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Proposer,
    Acceptor,
}

/// One side of a connection.
pub struct Endpoint<'a, S> {
    pub node: NodeId,
    pub uid: Uid,
    tokens: &'a mut TokenSet,
    pub state: &'a mut S,
}

impl<S> Endpoint<'_, S> {
    pub fn tokens(&self) -> &TokenSet {
        self.tokens
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TokenMove {
    pub token: TokenId,
    pub from: NodeId,
    pub to: NodeId,
}

/// A connection for one round: both endpoints plus the budget ledger.
/// Tokens only move through [`Link::send_token`].
pub struct Link<'a, S> {
    pub round: u64,
    pub proposer: Endpoint<'a, S>,
    pub acceptor: Endpoint<'a, S>,
    bits_used: usize,
    bit_cap: usize,
    tokens_sent: usize,
    token_cap: usize,
    moves: Vec<TokenMove>,
    rng: &'a RandomSource,
    params: &'a TransferParams,
}

impl<'a, S> Link<'a, S> {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        round: u64,
        proposer: (NodeId, Uid, &'a mut TokenSet, &'a mut S),
        acceptor: (NodeId, Uid, &'a mut TokenSet, &'a mut S),
        bit_cap: usize,
        token_cap: usize,
        rng: &'a RandomSource,
        params: &'a TransferParams,
    ) -> Self {
        Self {
            round,
            proposer: Endpoint {
                node: proposer.0,
                uid: proposer.1,
                tokens: proposer.2,
                state: proposer.3,
            },
            acceptor: Endpoint {
                node: acceptor.0,
                uid: acceptor.1,
                tokens: acceptor.2,
                state: acceptor.3,
            },
            bits_used: 0,
            bit_cap,
            tokens_sent: 0,
            token_cap,
            moves: Vec::new(),
            rng,
            params,
        }
    }

    fn overflow(&self, what: &'static str, used: usize, cap: usize) -> EngineError {
        EngineError::BudgetExceeded {
            round: self.round,
            a: self.proposer.node,
            b: self.acceptor.node,
            what,
            used,
            cap,
        }
    }

    /// Charges control bits against the connection's budget.
    pub fn spend_bits(&mut self, bits: usize) -> Result<(), EngineError> {
        let used = self.bits_used + bits;
        if used > self.bit_cap {
            return Err(self.overflow("bit", used, self.bit_cap));
        }
        self.bits_used = used;
        Ok(())
    }

    /// Sends `token` from `from` to the other side. Returns whether the
    /// receiver learned something new. Each send counts against the token cap.
    pub fn send_token(&mut self, from: Side, token: TokenId) -> Result<bool, EngineError> {
        let sent = self.tokens_sent + 1;
        if sent > self.token_cap {
            return Err(self.overflow("token", sent, self.token_cap));
        }
        let (src, dst) = match from {
            Side::Proposer => (&self.proposer, &mut self.acceptor),
            Side::Acceptor => (&self.acceptor, &mut self.proposer),
        };
        if !src.tokens.contains(token) {
            return Err(EngineError::NotHolder {
                round: self.round,
                node: src.node,
                token,
            });
        }
        let (from_node, to_node) = (src.node, dst.node);
        let learned = dst.tokens.insert(token);
        self.tokens_sent = sent;
        if learned {
            self.moves.push(TokenMove {
                token,
                from: from_node,
                to: to_node,
            });
        }
        Ok(learned)
    }

    /// Runs the transfer subroutine with the trial's error bound, charges
    /// its bits, and moves the located token, if any.
    pub fn transfer(&mut self) -> Result<TransferOutcome, EngineError> {
        let mut coins = self.pair_stream(Purpose::Transfer);
        let outcome = transfer::transfer(
            self.proposer.tokens,
            self.acceptor.tokens,
            self.params,
            &mut coins,
        );
        self.spend_bits(outcome.bits_used)?;
        if let Some((token, dir)) = outcome.moved {
            let from = match dir {
                Direction::UToV => Side::Proposer,
                Direction::VToU => Side::Acceptor,
            };
            self.send_token(from, token)?;
        }
        Ok(outcome)
    }

    pub fn transfer_params(&self) -> &TransferParams {
        self.params
    }

    pub fn endpoint(&self, side: Side) -> &Endpoint<'a, S> {
        match side {
            Side::Proposer => &self.proposer,
            Side::Acceptor => &self.acceptor,
        }
    }

    /// Private coins shared by the two endpoints for this round.
    pub fn pair_stream(&self, purpose: Purpose) -> ChaCha8Rng {
        self.rng
            .pair_round(self.proposer.node, self.acceptor.node, self.round, purpose)
    }

    pub fn bits_used(&self) -> usize {
        self.bits_used
    }

    pub fn bit_cap(&self) -> usize {
        self.bit_cap
    }

    pub fn tokens_sent(&self) -> usize {
        self.tokens_sent
    }

    pub(crate) fn into_moves(self) -> (usize, Vec<TokenMove>) {
        (self.bits_used, self.moves)
    }
}
