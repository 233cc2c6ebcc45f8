//! Gossip tokens and token sets.
//!
//! A token is identified by the UID of the node where it originated, so a
//! token set is a subset of `[N] = {1, ..., N}`. Sets are stored as dense
//! bitsets because every protocol in this crate needs fast equality, ordered
//! iteration, and range restriction.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Index of a node in a topology (`0..n`).
pub type NodeId = usize;

/// Unique identifier from `[N]`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Uid(pub u32);

impl Uid {
    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Uid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Tokens are labeled by their originator's UID.
pub type TokenId = Uid;

/// A subset of `[N]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TokenSet {
    universe: u32,
    words: Vec<u64>,
    len: usize,
}

impl TokenSet {
    /// Empty set over `[1, universe]`.
    pub fn empty(universe: u32) -> Self {
        let words = (universe as usize).div_ceil(64);
        Self {
            universe,
            words: vec![0; words],
            len: 0,
        }
    }

    pub fn from_tokens(universe: u32, tokens: impl IntoIterator<Item = u32>) -> Self {
        let mut set = Self::empty(universe);
        for t in tokens {
            set.insert(Uid(t));
        }
        set
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn slot(&self, token: TokenId) -> (usize, u64) {
        let t = token.0;
        assert!(
            t >= 1 && t <= self.universe,
            "token {t} outside [1, {}]",
            self.universe
        );
        let i = (t - 1) as usize;
        (i / 64, 1u64 << (i % 64))
    }

    pub fn contains(&self, token: TokenId) -> bool {
        if token.0 == 0 || token.0 > self.universe {
            return false;
        }
        let (w, m) = self.slot(token);
        self.words[w] & m != 0
    }

    /// Returns true if the token was newly added.
    pub fn insert(&mut self, token: TokenId) -> bool {
        let (w, m) = self.slot(token);
        if self.words[w] & m == 0 {
            self.words[w] |= m;
            self.len += 1;
            true
        } else {
            false
        }
    }

    /// Ascending iteration.
    pub fn iter(&self) -> impl Iterator<Item = TokenId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros();
                w &= w - 1;
                Some(Uid(wi as u32 * 64 + bit + 1))
            })
        })
    }

    /// Ascending iteration over `self ∩ [lo, hi]`.
    pub fn iter_range(&self, lo: u32, hi: u32) -> impl Iterator<Item = TokenId> + '_ {
        let lo = lo.max(1);
        let hi = hi.min(self.universe);
        let first_word = if lo > hi {
            self.words.len()
        } else {
            ((lo - 1) / 64) as usize
        };
        let last_word = if lo > hi { 0 } else { ((hi - 1) / 64) as usize };
        (first_word..=last_word.min(self.words.len().saturating_sub(1)))
            .filter(move |_| lo <= hi)
            .flat_map(move |wi| {
                let base = wi as u32 * 64 + 1;
                let mut w = self.words[wi];
                if lo > base {
                    w &= !0u64 << (lo - base);
                }
                if hi < base + 63 {
                    w &= (1u64 << (hi - base + 1)) - 1;
                }
                std::iter::from_fn(move || {
                    if w == 0 {
                        return None;
                    }
                    let bit = w.trailing_zeros();
                    w &= w - 1;
                    Some(Uid(base + bit))
                })
            })
    }

    pub fn is_subset(&self, other: &TokenSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Smallest token in exactly one of the two sets.
    pub fn min_symmetric_difference(&self, other: &TokenSet) -> Option<TokenId> {
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find_map(|(wi, (a, b))| {
                let x = a ^ b;
                (x != 0).then(|| Uid(wi as u32 * 64 + x.trailing_zeros() + 1))
            })
    }

    pub fn union_with(&mut self, other: &TokenSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        self.len = self.words.iter().map(|w| w.count_ones() as usize).sum();
    }
}

impl fmt::Debug for TokenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|t| t.0)).finish()
    }
}

impl PartialOrd for TokenSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TokenSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().map(|t| t.0).cmp(other.iter().map(|t| t.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn insert_and_iterate() {
        let mut s = TokenSet::empty(130);
        assert!(s.insert(Uid(65)));
        assert!(!s.insert(Uid(65)));
        s.insert(Uid(1));
        s.insert(Uid(130));
        assert_eq!(s.iter().map(|t| t.0).collect::<Vec<_>>(), vec![1, 65, 130]);
        assert_eq!(s.len(), 3);
        assert!(!s.contains(Uid(0)));
        assert!(!s.contains(Uid(131)));
    }

    #[test]
    fn symmetric_difference_minimum() {
        let a = TokenSet::from_tokens(16, [1, 3]);
        let b = TokenSet::from_tokens(16, [1, 2]);
        assert_eq!(a.min_symmetric_difference(&b), Some(Uid(2)));
        assert_eq!(a.min_symmetric_difference(&a), None);
    }

    proptest! {
        #[test]
        fn range_iteration_matches_filter(
            tokens in proptest::collection::btree_set(1u32..=200, 0..60),
            lo in 0u32..210,
            span in 0u32..210,
        ) {
            let set = TokenSet::from_tokens(200, tokens.iter().copied());
            let hi = lo.saturating_add(span);
            let got: Vec<u32> = set.iter_range(lo, hi).map(|t| t.0).collect();
            let want: Vec<u32> = tokens.iter().copied().filter(|&t| t >= lo && t <= hi).collect();
            prop_assert_eq!(got, want);
        }
    }
}
