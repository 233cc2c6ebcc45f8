//! PPUSH spreads one rumor; well-connected graphs finish much faster than
//! poorly expanding ones.

use mobile_gossip::algorithms::Ppush;
use mobile_gossip::engine::{own_tokens, run_trial, SimConfig};
use mobile_gossip::graph::{generate, GraphKind};

pub fn run_example() -> anyhow::Result<()> {
    let n = 64;
    for kind in [
        GraphKind::Complete { n },
        GraphKind::RandomRegular { n, d: 4 },
        GraphKind::Ring { n },
    ] {
        let topology = generate(&kind, 1)?;
        let alpha = topology.stats(2000, 1)?.alpha;
        let sim = SimConfig::new(n, 64, 1, 9);
        let initial = own_tokens(&sim, [0]);
        let rumor = initial[0].iter().next().expect("own token");
        let (record, _) = run_trial(
            sim,
            Ppush::new(rumor),
            &topology,
            initial,
            |w, _| w.is_gossip_complete(),
            |_, _| Ok(()),
        )?;
        println!(
            "{:<15} alpha~{alpha:.3} rounds={:?}",
            kind.name(),
            record.completion_round
        );
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
