//! Behavior properties recomputed from traces.

use mobile_gossip::algorithms::crowdedbin::{
    configuration, instance_position, is_good_configuration, Layout,
};
use mobile_gossip::algorithms::{
    sharedbit_tag, CrowdedBin, CrowdedBinParams, Ppush, SharedBit, SimSharedBit,
};
use mobile_gossip::engine::{own_tokens, run_trial, SimConfig};
use mobile_gossip::graph::{generate, GraphKind};
use mobile_gossip::randomness::SharedString;
use mobile_gossip::tokens::TokenSet;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn check_sharedbit_trace(kind: GraphKind, k: usize, seed: u64) {
    let topology = generate(&kind, seed).unwrap();
    let n = topology.n();
    let uid_space = (n as u32).next_power_of_two();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let string = SharedString::random(uid_space, &mut rng).unwrap();
    let sim = SimConfig::new(n, uid_space, 1, seed).with_max_rounds(5000);
    let initial = own_tokens(&sim, 0..k);
    let mut before: Vec<TokenSet> = initial.clone();
    let (rec, _) = run_trial(
        sim,
        SharedBit::new(string.clone()),
        &topology,
        initial,
        |w, _| w.is_gossip_complete(),
        |o, e| {
            let group = string.group(o.round).unwrap();
            let world = e.world();
            let g = topology.snapshot_for_round(o.round).unwrap();
            for (u, set) in before.iter().enumerate() {
                let expected = set.iter().fold(false, |acc, t| acc ^ group.token_bit(t));
                assert_eq!(o.tags[u].low_bit(), expected, "round {} node {u}", o.round);
                assert_eq!(sharedbit_tag(&group, set), expected);
                if set.is_empty() {
                    assert!(!expected);
                }
                let mut zeros: Vec<_> = g
                    .neighbors(u)
                    .iter()
                    .filter(|&&v| !o.tags[v].low_bit())
                    .map(|&v| (world.uid(v), v))
                    .collect();
                zeros.sort_unstable();
                let proposal = o.proposals.iter().find(|&&(p, _)| p == u).map(|&(_, t)| t);
                if expected && !zeros.is_empty() {
                    let pick = group.proposal_choice(world.uid(u), zeros.len());
                    assert_eq!(proposal, Some(zeros[pick].1));
                } else {
                    assert_eq!(proposal, None, "node {u} must listen");
                }
            }
            before = world.token_sets().to_vec();
            Ok(())
        },
    )
    .unwrap();
    assert!(!rec.dnf());
}

#[test]
fn sharedbit_tags_and_proposals_follow_the_string() {
    check_sharedbit_trace(GraphKind::Complete { n: 8 }, 8, 1);
    check_sharedbit_trace(GraphKind::Ring { n: 10 }, 6, 2);
    check_sharedbit_trace(
        GraphKind::FreshRandomEachTau {
            n: 12,
            p: 0.35,
            tau: 1,
        },
        12,
        3,
    );
    check_sharedbit_trace(GraphKind::TwoStars { delta: 3 }, 5, 4);
}

#[test]
fn sharedbit_two_nodes_progress_when_tags_differ() {
    let topology = generate(&GraphKind::Complete { n: 2 }, 0).unwrap();
    let mut differing = 0;
    let trials = 4000;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let string = SharedString::random(2, &mut rng).unwrap();
        let sim = SimConfig::new(2, 2, 1, seed);
        let initial = own_tokens(&sim, 0..2);
        let mut engine =
            mobile_gossip::engine::Engine::new(sim, SharedBit::new(string), &topology, initial)
                .unwrap();
        let o = engine.step().unwrap();
        if o.tags[0] != o.tags[1] {
            differing += 1;
            assert_eq!(o.matching.len(), 1);
            assert_eq!(o.phi_after, o.phi_before - 1);
        } else {
            assert!(o.matching.is_empty());
        }
    }
    let f = differing as f64 / trials as f64;
    assert!((f - 0.5).abs() <= 0.03, "differing tags in {f}");
}

#[test]
fn sharedbit_meets_the_budget_on_complete_graphs() {
    let n = 8;
    let topology = generate(&GraphKind::Complete { n }, 0).unwrap();
    let mut within = 0;
    for seed in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let string = SharedString::random(8, &mut rng).unwrap();
        let sim = SimConfig::new(n, 8, 1, seed).with_max_rounds(32 * 8 * 8);
        let initial = own_tokens(&sim, 0..n);
        let (rec, _) = run_trial(
            sim,
            SharedBit::new(string),
            &topology,
            initial,
            |w, _| w.is_gossip_complete(),
            |_, _| Ok(()),
        )
        .unwrap();
        within += usize::from(!rec.dnf());
    }
    assert!(within >= 190, "{within}/200 within 2048 rounds");
}

#[test]
fn ppush_informed_set_grows_only_through_connections() {
    for (kind, seed) in [
        (GraphKind::Complete { n: 32 }, 0),
        (GraphKind::Ring { n: 20 }, 1),
        (GraphKind::RandomRegular { n: 24, d: 3 }, 2),
        (
            GraphKind::FreshRandomEachTau {
                n: 16,
                p: 0.3,
                tau: 2,
            },
            3,
        ),
    ] {
        let topology = generate(&kind, seed).unwrap();
        let n = topology.n();
        let sim = SimConfig::new(n, (n as u32).next_power_of_two(), 1, seed);
        let initial = own_tokens(&sim, [0]);
        let rumor = initial[0].iter().next().unwrap();
        let mut informed: Vec<bool> = (0..n).map(|u| u == 0).collect();
        let (rec, _) = run_trial(
            sim,
            Ppush::new(rumor),
            &topology,
            initial,
            |w, _| w.is_gossip_complete(),
            |o, e| {
                for u in 0..n {
                    let now = e.world().tokens(u).contains(rumor);
                    assert!(!informed[u] || now, "node {u} forgot the rumor");
                    if now && !informed[u] {
                        let m = o
                            .transfers
                            .iter()
                            .find(|m| m.to == u)
                            .expect("arrived by transfer");
                        assert!(informed[m.from]);
                        assert!(
                            o.matching.contains(&(m.from, u)),
                            "sender must be the proposer"
                        );
                    }
                    informed[u] = now;
                }
                Ok(())
            },
        )
        .unwrap();
        assert!(!rec.dnf());
        assert_eq!(rec.bits_total, 0);
    }
}

#[test]
fn ppush_rejects_several_tokens() {
    let topology = generate(&GraphKind::Complete { n: 4 }, 0).unwrap();
    let sim = SimConfig::new(4, 4, 1, 0);
    let initial = own_tokens(&sim, 0..2);
    let rumor = initial[0].iter().next().unwrap();
    assert!(
        mobile_gossip::engine::Engine::new(sim, Ppush::new(rumor), &topology, initial).is_err()
    );
}

#[test]
fn simsharedbit_converges_to_the_minimum_uid() {
    let topology = generate(&GraphKind::Ring { n: 16 }, 0).unwrap();
    for seed in 0..100 {
        let sim = SimConfig::new(16, 16, 1, seed)
            .with_uid_assignment(mobile_gossip::engine::UidAssignment::RandomInjection);
        let initial = own_tokens(&sim, 0..16);
        let mut converged_at = None;
        let (rec, engine) = run_trial(
            sim,
            SimSharedBit,
            &topology,
            initial,
            |w, _| w.is_gossip_complete(),
            |o, e| {
                let min = *e.world().uids().iter().min().unwrap();
                let all = e.states().iter().all(|s| s.candidate() == min);
                match converged_at {
                    None if all => converged_at = Some(o.round),
                    Some(_) => assert!(all, "candidate changed after convergence"),
                    _ => {}
                }
                Ok(())
            },
        )
        .unwrap();
        assert!(!rec.dnf(), "seed {seed}");
        assert!(converged_at.is_some(), "seed {seed}");
        let first = engine.states()[0].string();
        assert!(engine.states().iter().all(|s| s.string() == first));
    }
}

fn crowdedbin_run(
    kind: GraphKind,
    k: usize,
    params: CrowdedBinParams,
    checked: bool,
    seed: u64,
) -> (bool, u32, Option<u32>, bool) {
    let topology = generate(&kind, seed).unwrap();
    let n = topology.n();
    let sim = SimConfig::new(n, 16, 1, seed).with_max_rounds(1_000_000);
    let initial = own_tokens(&sim, 0..k);
    let behavior = if checked {
        CrowdedBin::new(params)
    } else {
        CrowdedBin::unchecked(params)
    };
    let mut last = vec![1u32; n];
    let mut max_est = 1;
    let (rec, engine) = run_trial(
        sim,
        behavior,
        &topology,
        initial,
        |w, _| w.is_gossip_complete(),
        |_, e| {
            for (u, s) in e.states().iter().enumerate() {
                assert!(s.est() >= last[u], "estimate decreased at node {u}");
                last[u] = s.est();
                max_est = max_est.max(s.est());
            }
            Ok(())
        },
    )
    .unwrap();
    let (tags, bins) = configuration(engine.states());
    let g = is_good_configuration(&tags, &bins, k, 4, &params);
    (!rec.dnf(), max_est, g.target, g.good)
}

#[test]
fn crowdedbin_single_token_on_a_path() {
    let (done, est, target, good) = crowdedbin_run(
        GraphKind::Path { n: 2 },
        1,
        CrowdedBinParams::default(),
        true,
        0,
    );
    assert!(done && good);
    assert_eq!((est, target), (1, Some(1)));
}

#[test]
fn crowdedbin_estimates_stay_at_the_target() {
    for (i, kind) in [
        GraphKind::Complete { n: 16 },
        GraphKind::RandomRegular { n: 12, d: 3 },
    ]
    .into_iter()
    .enumerate()
    {
        let (done, est, target, good) =
            crowdedbin_run(kind, 12, CrowdedBinParams::default(), true, i as u64);
        assert!(done);
        if good {
            assert!(Some(est) <= target);
        }
    }
}

#[test]
fn crowdedbin_upgrades_under_crowding() {
    // γ·log2 N = 4 tags crowd a bin, so 16 tokens force a larger instance.
    let params = CrowdedBinParams {
        beta: 4,
        gamma: 1,
        confidence: 1,
    };
    let (done, est, target, good) =
        crowdedbin_run(GraphKind::Complete { n: 16 }, 16, params, false, 5);
    assert!(done);
    assert!(est >= 2, "estimate {est}");
    assert!(target.unwrap() >= 2);
    if good {
        assert!(Some(est) <= target);
    }
}

#[test]
fn crowdedbin_rejects_weak_constants() {
    let topology = generate(&GraphKind::Complete { n: 4 }, 0).unwrap();
    let sim = SimConfig::new(4, 16, 1, 0);
    let params = CrowdedBinParams {
        beta: 4,
        gamma: 11,
        confidence: 1,
    };
    let initial = own_tokens(&sim, 0..4);
    assert!(
        mobile_gossip::engine::Engine::new(sim, CrowdedBin::new(params), &topology, initial)
            .is_err()
    );
}

#[test]
fn balls_in_bins_never_crowd_at_n64() {
    let params = CrowdedBinParams {
        beta: 4,
        gamma: 9,
        confidence: 0,
    };
    let log_n = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let mut crowded = 0;
    for _ in 0..1000 {
        let tags: Vec<u64> = (0..64)
            .map(|_| rng.gen_range(1..1u64 << params.tag_len(log_n)))
            .collect();
        let bins: Vec<Vec<u64>> = (0..64)
            .map(|_| (1..=log_n).map(|j| rng.gen_range(1..=1u64 << j)).collect())
            .collect();
        for j in 1..=log_n as usize {
            let mut load = vec![0usize; 1 << j];
            for b in &bins {
                load[b[j - 1] as usize - 1] += 1;
            }
            crowded += load.iter().filter(|&&l| l >= 54).count();
        }
        let g = is_good_configuration(&tags, &bins, 64, log_n, &params);
        assert_eq!(g.target, Some(1));
        assert_eq!(g.good, g.unique_tags);
    }
    assert_eq!(crowded, 0);
}

proptest! {
    #[test]
    fn phase_length_identity(log_n in 1u32..8, beta in 1u32..6, gamma in 1u32..20, j in 1u32..8) {
        prop_assume!(j <= log_n && beta * log_n <= 63);
        let params = CrowdedBinParams { beta, gamma, confidence: 0 };
        let k_j = 1u64 << j;
        let layout = Layout::new(k_j, &params, log_n);
        let expected = gamma as u64 * (beta as u64 + 1) * k_j * (log_n as u64).pow(2);
        prop_assert_eq!(layout.phase_len, expected);
        let first = instance_position(1, k_j, &params, log_n);
        let next = instance_position(expected + 1, k_j, &params, log_n);
        prop_assert_eq!(first.phase + 1, next.phase);
        prop_assert_eq!((next.bin, next.block, next.offset), (1, 1, 1));
    }
}
