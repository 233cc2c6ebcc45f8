//! Whether a configuration of tags and bin choices is good: tags are unique
//! and the smallest instance without a crowded bin has at most `2k` bins.

use std::collections::BTreeSet;

use super::CrowdedBinParams;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Goodness {
    pub good: bool,
    pub unique_tags: bool,
    /// Smallest instance with no crowded bin.
    pub target: Option<u32>,
    /// Per instance, whether some bin holds at least `γ·log2 N` tags.
    pub crowded: Vec<bool>,
}

/// `tags[t]` is token `t`'s tag; `bins[t][j - 1]` is its bin (1-based) in
/// instance `j`, for `j = 1..=log2 N`.
pub fn is_good_configuration(
    tags: &[u64],
    bins: &[Vec<u64>],
    k: usize,
    log_n: u32,
    params: &CrowdedBinParams,
) -> Goodness {
    assert_eq!(tags.len(), bins.len(), "one bin vector per tag");
    let unique_tags = tags.iter().collect::<BTreeSet<_>>().len() == tags.len();
    let threshold = params.gamma as usize * log_n as usize;
    let crowded: Vec<bool> = (1..=log_n)
        .map(|j| {
            let mut per_bin = vec![BTreeSet::new(); 1 << j];
            for (tag, b) in tags.iter().zip(bins) {
                per_bin[(b[j as usize - 1] - 1) as usize].insert(*tag);
            }
            per_bin.iter().any(|s| s.len() >= threshold)
        })
        .collect();
    let target = crowded.iter().position(|&c| !c).map(|i| i as u32 + 1);
    let fits = target.is_some_and(|j| (1u64 << j) <= 2 * k as u64);
    Goodness {
        good: unique_tags && fits,
        unique_tags,
        target,
        crowded,
    }
}
