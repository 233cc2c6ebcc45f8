//! Exact metrics against brute-force enumeration.

use mobile_gossip::graph::{vertex_expansion_estimate, vertex_expansion_exact, StaticTopology};
use mobile_gossip::metrics::{
    coalition, frequency_multiset, is_eps_gossip_complete, is_gossip_complete, potential, Coalition,
};
use mobile_gossip::tokens::{TokenSet, Uid};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn brute_expansion(g: &StaticTopology) -> Ratio<u64> {
    let n = g.n();
    let mut best: Option<Ratio<u64>> = None;
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size > n / 2 {
            continue;
        }
        let mut boundary = 0u32;
        for u in (0..n).filter(|&u| mask >> u & 1 == 1) {
            for &v in g.neighbors(u) {
                boundary |= 1 << v;
            }
        }
        boundary &= !mask;
        let a = Ratio::new(boundary.count_ones() as u64, size as u64);
        best = Some(best.map_or(a, |b| b.min(a)));
    }
    best.unwrap()
}

fn complete(n: usize) -> StaticTopology {
    StaticTopology::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
}

fn cycle(n: usize) -> StaticTopology {
    StaticTopology::from_edges(n, (0..n).map(|u| (u, (u + 1) % n))).unwrap()
}

fn star(n: usize) -> StaticTopology {
    StaticTopology::from_edges(n, (1..n).map(|v| (0, v))).unwrap()
}

#[test]
fn expansion_hand_values() {
    for n in 2..=12u64 {
        let h = n / 2;
        assert_eq!(
            vertex_expansion_exact(&complete(n as usize)).unwrap(),
            Ratio::new(n - h, h)
        );
        assert_eq!(
            vertex_expansion_exact(&star(n as usize)).unwrap(),
            Ratio::new(1, h)
        );
        if n >= 3 {
            assert_eq!(
                vertex_expansion_exact(&cycle(n as usize)).unwrap(),
                Ratio::new(2, h)
            );
        }
    }
    assert_eq!(vertex_expansion_exact(&cycle(8)).unwrap(), Ratio::new(1, 2));
    assert_eq!(vertex_expansion_exact(&star(8)).unwrap(), Ratio::new(1, 4));
}

#[test]
fn expansion_estimates() {
    let path3 = StaticTopology::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    assert_eq!(vertex_expansion_estimate(&path3, 100, 0).unwrap(), 1.0);
    let c8 = vertex_expansion_estimate(&cycle(8), 10_000, 0).unwrap();
    assert_eq!(c8, 0.5);
}

fn random_connected(n: usize, p: f64, rng: &mut ChaCha8Rng) -> StaticTopology {
    loop {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| rng.gen_bool(p))
            .collect();
        if let Ok(g) = StaticTopology::from_edges(n, edges) {
            return g;
        }
    }
}

#[test]
fn expansion_matches_brute_force_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let n = rng.gen_range(2..=12);
        let g = random_connected(n, rng.gen_range(0.2..0.9), &mut rng);
        assert_eq!(vertex_expansion_exact(&g).unwrap(), brute_expansion(&g));
    }
}

/// All subsets of nodes of size `need`, checking pairwise mutual knowledge.
fn brute_eps(sets: &[TokenSet], owners: &[Uid], need: usize) -> bool {
    let n = sets.len();
    (0u32..(1 << n)).any(|mask| {
        let members: Vec<usize> = (0..n).filter(|&u| mask >> u & 1 == 1).collect();
        members.len() >= need
            && members.iter().all(|&u| {
                members.iter().all(|&v| {
                    u == v || (sets[u].contains(owners[v]) && sets[v].contains(owners[u]))
                })
            })
    })
}

#[test]
fn eps_gossip_matches_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let eps_choices = [
        (1u64, 4u64),
        (1, 3),
        (1, 2),
        (3, 5),
        (2, 3),
        (3, 4),
        (9, 10),
    ];
    let mut positives = 0;
    for _ in 0..500 {
        let n = rng.gen_range(2..=12usize);
        let density = rng.gen_range(0.2..1.0);
        let owners: Vec<Uid> = (1..=n as u32).map(Uid).collect();
        let sets: Vec<TokenSet> = (0..n)
            .map(|u| {
                TokenSet::from_tokens(
                    16,
                    (1..=n as u32).filter(|&t| t == u as u32 + 1 || rng.gen_bool(density)),
                )
            })
            .collect();
        let (num, den) = eps_choices[rng.gen_range(0..eps_choices.len())];
        let need = (num * n as u64).div_ceil(den) as usize;
        let eps = num as f64 / den as f64;
        let expected = brute_eps(&sets, &owners, need);
        positives += usize::from(expected);
        assert_eq!(
            is_eps_gossip_complete(&sets, &owners, eps).unwrap(),
            expected
        );
    }
    assert!(
        positives > 50 && positives < 450,
        "{positives} positive states"
    );
}

fn random_state() -> impl Strategy<Value = (Vec<TokenSet>, usize)> {
    (2usize..10, 1usize..10).prop_flat_map(|(n, k)| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), k), n).prop_map(
            move |rows| {
                let sets = rows
                    .iter()
                    .map(|r| {
                        TokenSet::from_tokens(16, (1..=k as u32).filter(|&t| r[t as usize - 1]))
                    })
                    .collect();
                (sets, k)
            },
        )
    })
}

proptest! {
    #[test]
    fn potential_zero_iff_complete((sets, k) in random_state()) {
        let phi: u64 = sets.iter().map(|s| (k - s.len()) as u64).sum();
        prop_assert_eq!(potential(&sets, k), phi);
        prop_assert_eq!(is_gossip_complete(&sets, k), phi == 0);
        let f = frequency_multiset(&sets);
        prop_assert_eq!(f.total(), sets.len());
        for (set, q) in &f.entries {
            prop_assert_eq!(*q, sets.iter().filter(|s| *s == set).count());
        }
    }

    #[test]
    fn coalition_sizes((sets, _) in random_state(), eps in 0.5f64..0.99) {
        let n = sets.len();
        let f = frequency_multiset(&sets);
        match coalition(&f, n, eps) {
            Coalition::Solved => prop_assert!(f.max_count() as f64 > eps * n as f64),
            Coalition::Members(c) => {
                let total: usize = c.iter().map(|&i| f.entries[i].1).sum();
                prop_assert!(eps / 2.0 * n as f64 <= total as f64);
                prop_assert!(total as f64 <= eps * n as f64);
            }
        }
    }

    #[test]
    fn complete_gossip_is_eps_complete(n in 2usize..12, eps in 0.01f64..0.99) {
        let owners: Vec<Uid> = (1..=n as u32).map(Uid).collect();
        let sets = vec![TokenSet::from_tokens(16, 1..=n as u32); n];
        prop_assert!(is_eps_gossip_complete(&sets, &owners, eps).unwrap());
    }
}
