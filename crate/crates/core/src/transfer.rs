//! Token transfer between two connected nodes.
//!
//! `eq_test` decides set equality with one-sided error using characteristic
//! polynomial fingerprints: a set `S ⊆ [N]` maps to `Σ_{t∈S} x^t mod q` for a
//! prime `q > 2N` and a uniform point `x ∈ [1, q-1]`. Distinct sets differ by
//! a non-zero polynomial of degree at most `N` that vanishes at `x = 0`, so a
//! single trial collides with probability below `1/2`.
//!
//! `transfer` binary-searches `[1, N]` for the smallest token held by exactly
//! one side, testing `set ∩ [a, m]` at each step, then moves that token from
//! the side that holds it.

use rand::Rng;
use thiserror::Error;

use crate::tokens::{TokenId, TokenSet};

/// Bits spent after the search: each side announces whether it holds the
/// located token.
pub const OWNERSHIP_BITS: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum TransferError {
    #[error("transfer error bound must lie in (0, 1), got {0}")]
    Epsilon(f64),
    #[error("UID space must be at least 2, got {0}")]
    UidSpace(u32),
}

/// `⌈log2 x⌉` for `x >= 1`.
pub fn log2_ceil(x: u64) -> u32 {
    assert!(x >= 1);
    64 - (x - 1).leading_zeros()
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Prime field used for fingerprints over `[N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FingerprintField {
    q: u64,
}

/// A fingerprint value together with the field and point it was taken at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fingerprint {
    pub q: u64,
    pub x: u64,
    pub value: u64,
}

impl FingerprintField {
    /// Smallest prime `q >= 2N + 1`.
    pub fn for_uid_space(uid_space: u32) -> Self {
        let mut q = 2 * uid_space as u64 + 1;
        while !is_prime(q) {
            q += 1;
        }
        Self { q }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Bits needed to send one fingerprint value.
    pub fn value_bits(&self) -> usize {
        log2_ceil(self.q) as usize
    }

    /// Fingerprint of `set ∩ [lo, hi]` at point `x`.
    pub fn fingerprint(&self, set: &TokenSet, lo: u32, hi: u32, x: u64) -> Fingerprint {
        let q = self.q;
        let value = set
            .iter_range(lo, hi)
            .fold(0u64, |acc, t| (acc + pow_mod(x, t.0 as u64, q)) % q);
        Fingerprint { q, x, value }
    }

    fn random_point(&self, rng: &mut impl Rng) -> u64 {
        rng.gen_range(1..self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EqTestOutcome {
    pub equal: bool,
    pub bits_used: usize,
}

/// Equality test with `trials` independent fingerprint comparisons. Both
/// sides send their fingerprint each trial; the evaluation point comes from
/// the pair's shared stream, so it costs no bits.
pub fn eq_test(
    a: &TokenSet,
    b: &TokenSet,
    trials: u32,
    field: &FingerprintField,
    rng: &mut impl Rng,
) -> EqTestOutcome {
    eq_test_range(a, b, 1, field_universe(a, b), trials, field, rng)
}

fn field_universe(a: &TokenSet, b: &TokenSet) -> u32 {
    a.universe().max(b.universe())
}

fn eq_test_range(
    a: &TokenSet,
    b: &TokenSet,
    lo: u32,
    hi: u32,
    trials: u32,
    field: &FingerprintField,
    rng: &mut impl Rng,
) -> EqTestOutcome {
    let per_trial = 2 * field.value_bits();
    let mut bits_used = 0;
    for _ in 0..trials {
        let x = field.random_point(rng);
        bits_used += per_trial;
        if field.fingerprint(a, lo, hi, x).value != field.fingerprint(b, lo, hi, x).value {
            return EqTestOutcome {
                equal: false,
                bits_used,
            };
        }
    }
    EqTestOutcome {
        equal: true,
        bits_used,
    }
}

/// Fixed parameters of `Transfer(ε)` over `[N]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferParams {
    uid_space: u32,
    epsilon: f64,
    trials: u32,
    field: FingerprintField,
}

impl TransferParams {
    pub fn new(uid_space: u32, epsilon: f64) -> Result<Self, TransferError> {
        if uid_space < 2 {
            return Err(TransferError::UidSpace(uid_space));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(TransferError::Epsilon(epsilon));
        }
        Ok(Self {
            uid_space,
            epsilon,
            trials: trials_for(uid_space, epsilon),
            field: FingerprintField::for_uid_space(uid_space),
        })
    }

    pub fn uid_space(&self) -> u32 {
        self.uid_space
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// EQTest trials per call.
    pub fn trials(&self) -> u32 {
        self.trials
    }

    pub fn field(&self) -> &FingerprintField {
        &self.field
    }

    /// Upper bound on EQTest calls per transfer, `⌈log2 N⌉`.
    pub fn max_eq_calls(&self) -> u32 {
        log2_ceil(self.uid_space as u64)
    }

    /// Worst-case bits of one EQTest call.
    pub fn per_call_bits(&self) -> usize {
        self.trials as usize * 2 * self.field.value_bits()
    }

    /// Worst-case control bits of one transfer.
    pub fn bit_bound(&self) -> usize {
        self.max_eq_calls() as usize * self.per_call_bits() + OWNERSHIP_BITS
    }
}

/// `c = ⌈log2(⌈log2 N⌉ / ε)⌉`, at least 1.
pub fn trials_for(uid_space: u32, epsilon: f64) -> u32 {
    let calls = log2_ceil(uid_space.max(2) as u64) as f64;
    let c = (calls / epsilon).log2().ceil();
    // guard against log2 rounding just above an integer
    let c = if (c - 1.0).exp2() * epsilon >= calls {
        c - 1.0
    } else {
        c
    };
    c.max(1.0) as u32
}

/// Which side sends the located token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    UToV,
    VToU,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferOutcome {
    pub moved: Option<(TokenId, Direction)>,
    pub bits_used: usize,
    pub eq_calls: u32,
}

/// Locates the smallest token outside `set_u ∩ set_v` and reports who should
/// send it. When every EQTest answers correctly the answer is exact; equal
/// sets always yield `None`.
pub fn transfer(
    set_u: &TokenSet,
    set_v: &TokenSet,
    params: &TransferParams,
    rng: &mut impl Rng,
) -> TransferOutcome {
    let field = params.field();
    let (mut a, mut b) = (1u32, params.uid_space);
    let mut bits_used = 0;
    let mut eq_calls = 0;
    while a < b {
        let m = a + (b - a) / 2;
        let r = eq_test_range(set_u, set_v, a, m, params.trials, field, rng);
        bits_used += r.bits_used;
        eq_calls += 1;
        if r.equal {
            a = m + 1;
        } else {
            b = m;
        }
    }
    bits_used += OWNERSHIP_BITS;
    let token = crate::tokens::Uid(a);
    let moved = match (set_u.contains(token), set_v.contains(token)) {
        (true, false) => Some((token, Direction::UToV)),
        (false, true) => Some((token, Direction::VToU)),
        _ => None,
    };
    TransferOutcome {
        moved,
        bits_used,
        eq_calls,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokens::Uid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(tokens: &[u32]) -> TokenSet {
        TokenSet::from_tokens(16, tokens.iter().copied())
    }

    #[test]
    fn field_choice() {
        assert_eq!(FingerprintField::for_uid_space(16).modulus(), 37);
        assert_eq!(FingerprintField::for_uid_space(64).modulus(), 131);
        assert_eq!(FingerprintField::for_uid_space(16).value_bits(), 6);
    }

    #[test]
    fn trial_count_formula() {
        // ⌈log2(4 / 0.01)⌉ = ⌈log2 400⌉ = 9
        assert_eq!(trials_for(16, 0.01), 9);
        // ⌈log2(4 / 0.25)⌉ = 4 exactly
        assert_eq!(trials_for(16, 0.25), 4);
        assert_eq!(trials_for(2, 0.9), 1);
    }

    #[test]
    fn eq_test_one_sided() {
        let field = FingerprintField::for_uid_space(16);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for c in 1..5 {
            assert!(eq_test(&set(&[1, 5, 9]), &set(&[1, 5, 9]), c, &field, &mut rng).equal);
            assert!(eq_test(&set(&[]), &set(&[]), c, &field, &mut rng).equal);
        }
    }

    #[test]
    fn eq_test_distinguishes_with_high_probability() {
        let field = FingerprintField::for_uid_space(16);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let not_equal = (0..10_000)
            .filter(|_| !eq_test(&set(&[1]), &set(&[2]), 20, &field, &mut rng).equal)
            .count();
        assert!(not_equal >= 9_990, "{not_equal}");
    }

    #[test]
    fn eq_test_bits_within_bound() {
        let field = FingerprintField::for_uid_space(16);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = eq_test(&set(&[1, 2]), &set(&[1, 2]), 7, &field, &mut rng);
        assert_eq!(r.bits_used, 7 * 2 * field.value_bits());
    }

    #[test]
    fn transfer_examples() {
        let params = TransferParams::new(16, 0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = transfer(&set(&[1, 3]), &set(&[1, 2]), &params, &mut rng);
        assert_eq!(r.moved, Some((Uid(2), Direction::VToU)));
        let r = transfer(&set(&[4, 7]), &set(&[4, 7]), &params, &mut rng);
        assert_eq!(r.moved, None);
        let r = transfer(&set(&[5]), &set(&[]), &params, &mut rng);
        assert_eq!(r.moved, Some((Uid(5), Direction::UToV)));
    }

    #[test]
    fn transfer_budget_n16() {
        let params = TransferParams::new(16, 0.01).unwrap();
        assert_eq!(params.trials(), 9);
        assert_eq!(params.max_eq_calls(), 4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = transfer(&set(&[16]), &set(&[]), &params, &mut rng);
        assert_eq!(r.eq_calls, 4);
        assert!(r.bits_used <= 4 * params.per_call_bits() + OWNERSHIP_BITS);
        assert_eq!(params.bit_bound(), 4 * 9 * 2 * 6 + 2);
    }

    #[test]
    fn rejects_bad_params() {
        assert_eq!(
            TransferParams::new(16, 0.0),
            Err(TransferError::Epsilon(0.0))
        );
        assert_eq!(
            TransferParams::new(16, 1.0),
            Err(TransferError::Epsilon(1.0))
        );
        assert_eq!(TransferParams::new(1, 0.5), Err(TransferError::UidSpace(1)));
    }
}
