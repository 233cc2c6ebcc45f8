use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{GraphError, StaticTopology};
use crate::rng::{Purpose, RandomSource};

/// Largest node count for exhaustive subset enumeration.
pub const EXACT_EXPANSION_LIMIT: usize = 20;

/// `min |∂S| / |S|` over all non-empty `S` with `|S| <= n/2`, where `∂S` is
/// the set of nodes outside `S` with a neighbor in `S`.
pub fn vertex_expansion_exact(g: &StaticTopology) -> Result<Ratio<u64>, GraphError> {
    let n = g.n();
    if n > EXACT_EXPANSION_LIMIT {
        return Err(GraphError::TooLarge {
            n,
            limit: EXACT_EXPANSION_LIMIT,
        });
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    let nbr: Vec<u32> = (0..n)
        .map(|u| g.neighbors(u).iter().fold(0u32, |m, &v| m | (1 << v)))
        .collect();
    let full = 1usize << n;
    // union[mask] = OR of neighbor masks of members, built from mask minus its low bit.
    let mut union = vec![0u32; full];
    let mut best: Option<(u64, u64)> = None;
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        union[mask] = union[mask & (mask - 1)] | nbr[low];
        let size = (mask as u32).count_ones() as u64;
        if size as usize > n / 2 {
            continue;
        }
        let boundary = (union[mask] & !(mask as u32)).count_ones() as u64;
        best = match best {
            Some((b, s)) if b * size <= boundary * s => Some((b, s)),
            _ => Some((boundary, size)),
        };
    }
    let (b, s) = best.expect("n >= 2 gives at least one singleton");
    Ok(Ratio::new(b, s))
}

/// Sampled upper bound on the vertex expansion. Half the samples grow `S` by
/// randomized BFS from a random start, half draw `S` uniformly.
pub fn vertex_expansion_estimate(
    g: &StaticTopology,
    trials: usize,
    seed: u64,
) -> Result<f64, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    if trials == 0 {
        return Err(GraphError::InvalidParams("trials must be >= 1".into()));
    }
    let n = g.n();
    let mut rng = RandomSource::new(seed).global(Purpose::Topology, 0);
    let mut in_set = vec![false; n];
    let mut members = Vec::with_capacity(n);
    let mut nodes: Vec<usize> = (0..n).collect();
    let mut best = f64::INFINITY;
    for trial in 0..trials {
        let size = rng.gen_range(1..=n / 2);
        in_set.iter_mut().for_each(|x| *x = false);
        members.clear();
        if trial % 2 == 0 {
            let start = rng.gen_range(0..n);
            in_set[start] = true;
            members.push(start);
            let mut frontier: Vec<usize> = Vec::new();
            while members.len() < size {
                frontier.clear();
                for &u in &members {
                    frontier.extend(g.neighbors(u).iter().copied().filter(|&v| !in_set[v]));
                }
                frontier.sort_unstable();
                frontier.dedup();
                let Some(&next) = frontier.choose(&mut rng) else {
                    break;
                };
                in_set[next] = true;
                members.push(next);
            }
        } else {
            nodes.shuffle(&mut rng);
            for &u in &nodes[..size] {
                in_set[u] = true;
                members.push(u);
            }
        }
        let boundary = (0..n)
            .filter(|&v| !in_set[v] && g.neighbors(v).iter().any(|&u| in_set[u]))
            .count();
        best = best.min(boundary as f64 / members.len() as f64);
    }
    Ok(best)
}

pub fn max_degree(g: &StaticTopology) -> usize {
    (0..g.n()).map(|u| g.degree(u)).max().unwrap_or(0)
}

/// Longest shortest path, by BFS from every node.
pub fn diameter(g: &StaticTopology) -> Result<usize, GraphError> {
    let mut diam = 0;
    for src in 0..g.n() {
        for d in g.bfs_distances(src) {
            diam = diam.max(d.ok_or(GraphError::Disconnected)?);
        }
    }
    Ok(diam)
}
