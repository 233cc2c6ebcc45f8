//! The shared random string used by SharedBit and its seeded expansion.
//!
//! The string is split into `32·N²` groups, one per round. Each group holds
//! one bundle of `⌈log2 N⌉ + 1` bits for every UID in `[N]`: the first bit of
//! bundle `t` is token `t`'s bit for that round, the remaining bits feed the
//! proposal choice of the node with UID `t`.
//!
//! Strings are never materialized in full. A keyed ChaCha stream in counter
//! mode supplies any bit range on demand, and a seed of a few dozen bits
//! names a key through SHA-256.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rng::mix64;
use crate::tokens::Uid;
use crate::transfer::log2_ceil;

/// Groups per `N²`.
pub const GROUPS_PER_N2: u64 = 32;

/// Rejection-sampling attempts before `proposal_choice` falls back to modulo.
pub const MAX_REJECTIONS: u64 = 64;

/// Seed length in multiples of `⌈log2 N⌉`.
pub const SEED_BITS_PER_LOG: usize = 4;

const EXPAND_LABEL: &[u8] = b"mobile-gossip/shared-string/v1";

#[derive(Debug, Error, PartialEq)]
pub enum RandomnessError {
    #[error("round {round} exceeds the {groups} groups of the shared string")]
    RoundExhausted { round: u64, groups: u64 },
    #[error("UID {uid} outside [1, {uid_space}]")]
    UidOutOfRange { uid: u32, uid_space: u32 },
    #[error("UID space must be a power of two >= 2, got {0}")]
    UidSpace(u32),
    #[error("materialized string has {got} bits, layout needs {need}")]
    Length { got: usize, need: u128 },
    #[error("seed must be {expected} bits, got {got}")]
    SeedLength { expected: usize, got: usize },
    #[error("seed hex: {0}")]
    Hex(#[from] hex::FromHexError),
}

/// A short label from which a shared string is expanded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed {
    bytes: Vec<u8>,
    bits: usize,
}

impl Seed {
    /// Seed length for UID space `N`: `4·⌈log2 N⌉` bits.
    pub fn bits_for(uid_space: u32) -> usize {
        SEED_BITS_PER_LOG * log2_ceil(uid_space.max(2) as u64) as usize
    }

    pub fn random(uid_space: u32, rng: &mut impl Rng) -> Self {
        let bits = Self::bits_for(uid_space);
        let mut bytes = vec![0u8; bits.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        Self::masked(bytes, bits)
    }

    fn masked(mut bytes: Vec<u8>, bits: usize) -> Self {
        let spare = bytes.len() * 8 - bits;
        if spare > 0 {
            if let Some(last) = bytes.last_mut() {
                *last &= 0xFF >> spare;
            }
        }
        Self { bytes, bits }
    }

    pub fn from_bytes(bytes: Vec<u8>, bits: usize) -> Result<Self, RandomnessError> {
        if bytes.len() != bits.div_ceil(8) {
            return Err(RandomnessError::SeedLength {
                expected: bits,
                got: bytes.len() * 8,
            });
        }
        Ok(Self::masked(bytes, bits))
    }

    /// Parses a hex seed; its length is the full byte length in bits.
    pub fn from_hex(s: &str) -> Result<Self, RandomnessError> {
        let bytes = hex::decode(s.trim())?;
        let bits = bytes.len() * 8;
        Ok(Self { bytes, bits })
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.bytes)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    fn key(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(EXPAND_LABEL);
        h.update((self.bytes.len() as u64).to_le_bytes());
        h.update(&self.bytes);
        h.finalize().into()
    }
}

/// First `len` bits of the stream named by `seed`. Identical to the prefix of
/// [`SharedString::from_seed`] for any UID space.
pub fn expand_seed(seed: &Seed, len: usize) -> Vec<bool> {
    let words = read_words(&seed.key(), 0, len.div_ceil(32));
    (0..len)
        .map(|i| (words[i / 32] >> (i % 32)) & 1 == 1)
        .collect()
}

fn read_words(key: &[u8; 32], first_word: u128, count: usize) -> Vec<u32> {
    let mut rng = ChaCha8Rng::from_seed(*key);
    rng.set_word_pos(first_word);
    (0..count).map(|_| rng.next_u32()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Backing {
    Keyed([u8; 32]),
    Bits(Vec<bool>),
}

/// The shared string for UID space `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedString {
    uid_space: u32,
    groups: u64,
    bundle_bits: usize,
    backing: Backing,
}

impl SharedString {
    fn layout(uid_space: u32) -> Result<(u64, usize), RandomnessError> {
        if uid_space < 2 || !uid_space.is_power_of_two() {
            return Err(RandomnessError::UidSpace(uid_space));
        }
        let n = uid_space as u64;
        Ok((GROUPS_PER_N2 * n * n, log2_ceil(n) as usize + 1))
    }

    pub fn from_seed(uid_space: u32, seed: &Seed) -> Result<Self, RandomnessError> {
        Self::from_key(uid_space, seed.key())
    }

    pub fn from_key(uid_space: u32, key: [u8; 32]) -> Result<Self, RandomnessError> {
        let (groups, bundle_bits) = Self::layout(uid_space)?;
        Ok(Self {
            uid_space,
            groups,
            bundle_bits,
            backing: Backing::Keyed(key),
        })
    }

    /// A fresh uniformly random string.
    pub fn random(uid_space: u32, rng: &mut impl Rng) -> Result<Self, RandomnessError> {
        let mut key = [0u8; 32];
        rng.fill_bytes(&mut key);
        Self::from_key(uid_space, key)
    }

    /// A fully materialized string; `bits.len()` must equal [`Self::total_bits`].
    pub fn from_bits(uid_space: u32, bits: Vec<bool>) -> Result<Self, RandomnessError> {
        let (groups, bundle_bits) = Self::layout(uid_space)?;
        let need = groups as u128 * uid_space as u128 * bundle_bits as u128;
        if bits.len() as u128 != need {
            return Err(RandomnessError::Length {
                got: bits.len(),
                need,
            });
        }
        Ok(Self {
            uid_space,
            groups,
            bundle_bits,
            backing: Backing::Bits(bits),
        })
    }

    pub fn uid_space(&self) -> u32 {
        self.uid_space
    }

    pub fn groups(&self) -> u64 {
        self.groups
    }

    pub fn bundle_bits(&self) -> usize {
        self.bundle_bits
    }

    pub fn total_bits(&self) -> u128 {
        self.groups as u128 * self.uid_space as u128 * self.bundle_bits as u128
    }

    /// Backing index (0-based) of bit `offset` of bundle `t` in group `g`.
    pub fn bit_index(&self, group: u64, t: u32, offset: usize) -> u128 {
        ((group as u128 - 1) * self.uid_space as u128 + (t as u128 - 1)) * self.bundle_bits as u128
            + offset as u128
    }

    fn check(&self, round: u64, uid: u32) -> Result<(), RandomnessError> {
        if round == 0 || round > self.groups {
            return Err(RandomnessError::RoundExhausted {
                round,
                groups: self.groups,
            });
        }
        if uid == 0 || uid > self.uid_space {
            return Err(RandomnessError::UidOutOfRange {
                uid,
                uid_space: self.uid_space,
            });
        }
        Ok(())
    }

    fn read(&self, start: u128, len: usize) -> Vec<bool> {
        match &self.backing {
            Backing::Bits(b) => b[start as usize..start as usize + len].to_vec(),
            Backing::Keyed(key) => {
                let first = start / 32;
                let skip = (start % 32) as usize;
                let words = read_words(key, first, (skip + len).div_ceil(32));
                (skip..skip + len)
                    .map(|i| (words[i / 32] >> (i % 32)) & 1 == 1)
                    .collect()
            }
        }
    }

    /// Token `t`'s bit in round `r`.
    pub fn token_bit(&self, round: u64, t: Uid) -> Result<bool, RandomnessError> {
        self.check(round, t.0)?;
        Ok(self.read(self.bit_index(round, t.0, 0), 1)[0])
    }

    /// Every bundle of group `round`, for repeated lookups within a round.
    pub fn group(&self, round: u64) -> Result<Group, RandomnessError> {
        self.check(round, 1)?;
        let len = self.uid_space as usize * self.bundle_bits;
        Ok(Group {
            bundle_bits: self.bundle_bits,
            bits: self.read(self.bit_index(round, 1, 0), len),
        })
    }

    /// The index in `[0, d)` that node `uid` derives in round `r`.
    pub fn proposal_choice(
        &self,
        round: u64,
        uid: Uid,
        d: usize,
    ) -> Result<usize, RandomnessError> {
        self.check(round, uid.0)?;
        let bits = self.read(self.bit_index(round, uid.0, 1), self.bundle_bits - 1);
        Ok(choose_index(pack(&bits), bits.len(), d))
    }
}

fn pack(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
}

/// Near-uniform index in `[0, d)` from `width` random bits `v`: take the low
/// `⌈log2 d⌉` bits if they land in range, otherwise retry on hash-expanded
/// variants of `v`, falling back to `v mod d`.
fn choose_index(v: u64, width: usize, d: usize) -> usize {
    assert!(d >= 1, "candidate count must be positive");
    if d == 1 {
        return 0;
    }
    let m = log2_ceil(d as u64);
    let mask = (1u64 << m) - 1;
    if (m as usize) <= width && ((v & mask) as usize) < d {
        return (v & mask) as usize;
    }
    for i in 1..=MAX_REJECTIONS {
        let h = mix64(v ^ mix64(i)) & mask;
        if (h as usize) < d {
            return h as usize;
        }
    }
    (v % d as u64) as usize
}

/// One group of the shared string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    bundle_bits: usize,
    bits: Vec<bool>,
}

impl Group {
    pub fn token_bit(&self, t: Uid) -> bool {
        self.bits[(t.0 as usize - 1) * self.bundle_bits]
    }

    pub fn proposal_choice(&self, uid: Uid, d: usize) -> usize {
        let start = (uid.0 as usize - 1) * self.bundle_bits + 1;
        let bits = &self.bits[start..start + self.bundle_bits - 1];
        choose_index(pack(bits), bits.len(), d)
    }
}
