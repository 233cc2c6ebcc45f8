//! CrowdedBin's round arithmetic.
//!
//! Global rounds are dealt round-robin to the `log2 N` instances. Within an
//! instance, rounds are grouped into blocks of `ℓ + log2 N` rounds (ℓ tag
//! bits followed by `log2 N` PPUSH rounds), bins of `γ·log2 N` blocks, and
//! phases of `k_i` bins. All indices are 1-based.

use super::CrowdedBinParams;

/// Which part of a block a round falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    /// Bit `index` (1-based, most significant first) of a spelled tag.
    TagBit(u32),
    /// PPUSH round `index` of the block.
    PpushRound(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub phase: u64,
    pub bin: u64,
    pub block: u64,
    pub offset: u64,
    pub segment: Segment,
}

/// Lengths of the nested schedule units for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub tag_len: u64,
    pub ppush_len: u64,
    pub block_len: u64,
    pub blocks_per_bin: u64,
    pub bin_len: u64,
    pub bins: u64,
    pub phase_len: u64,
}

impl Layout {
    pub fn new(k_i: u64, params: &CrowdedBinParams, log_n: u32) -> Self {
        let log_n = log_n as u64;
        let tag_len = params.beta as u64 * log_n;
        let block_len = tag_len + log_n;
        let blocks_per_bin = params.gamma as u64 * log_n;
        let bin_len = blocks_per_bin * block_len;
        Self {
            tag_len,
            ppush_len: log_n,
            block_len,
            blocks_per_bin,
            bin_len,
            bins: k_i,
            phase_len: k_i * bin_len,
        }
    }

    /// Decomposes instance round `i >= 1`.
    pub fn position(&self, i: u64) -> Position {
        assert!(i >= 1, "instance rounds are 1-based");
        let x = i - 1;
        let in_phase = x % self.phase_len;
        let in_bin = in_phase % self.bin_len;
        let offset = in_bin % self.block_len + 1;
        let segment = if offset <= self.tag_len {
            Segment::TagBit(offset as u32)
        } else {
            Segment::PpushRound((offset - self.tag_len) as u32)
        };
        Position {
            phase: x / self.phase_len + 1,
            bin: in_phase / self.bin_len + 1,
            block: in_bin / self.block_len + 1,
            offset,
            segment,
        }
    }

    pub fn is_phase_start(&self, p: &Position) -> bool {
        p.bin == 1 && p.block == 1 && p.offset == 1
    }

    pub fn is_bin_end(&self, p: &Position) -> bool {
        p.block == self.blocks_per_bin && p.offset == self.block_len
    }

    pub fn is_phase_end(&self, p: &Position) -> bool {
        p.bin == self.bins && self.is_bin_end(p)
    }
}

/// `(instance j, instance round i)` for global round `g`, with `log_n`
/// instances: `j = ((g − 1) mod log2 N) + 1`, `i = ⌈g / log2 N⌉`.
pub fn schedule_map(g: u64, log_n: u32) -> (u32, u64) {
    assert!(g >= 1 && log_n >= 1);
    let l = log_n as u64;
    (((g - 1) % l + 1) as u32, g.div_ceil(l))
}

/// Position of instance round `i` of an instance with `k_i` bins.
pub fn instance_position(i: u64, k_i: u64, params: &CrowdedBinParams, log_n: u32) -> Position {
    Layout::new(k_i, params, log_n).position(i)
}
