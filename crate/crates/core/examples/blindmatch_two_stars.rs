//! BlindMatch on two adjacent stars: the token at one center needs the two
//! centers to meet, which gets quadratically rarer as the stars grow.

use mobile_gossip::algorithms::BlindMatch;
use mobile_gossip::engine::{own_tokens, run_trial, SimConfig};
use mobile_gossip::graph::{generate, GraphKind};

pub fn run_example() -> anyhow::Result<()> {
    for delta in [2, 4, 8] {
        let topology = generate(&GraphKind::TwoStars { delta }, 0)?;
        let n = topology.n();
        let mut rounds = Vec::new();
        for seed in 0..25 {
            let sim = SimConfig::new(n, (n as u32).next_power_of_two(), 0, seed);
            let initial = own_tokens(&sim, [0]);
            let (record, _) = run_trial(
                sim,
                BlindMatch,
                &topology,
                initial,
                |w, _| !w.tokens(1).is_empty(),
                |_, _| Ok(()),
            )?;
            rounds.push(record.completion_round.expect("finishes"));
        }
        rounds.sort_unstable();
        println!(
            "delta={delta:<2} median rounds until the far center is informed: {}",
            rounds[12]
        );
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
