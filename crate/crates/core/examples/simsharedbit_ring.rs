//! SimSharedBit: no preshared string; even rounds spread the seed of the
//! smallest UID, odd rounds run SharedBit with the seed a node currently
//! trusts.

use mobile_gossip::algorithms::SimSharedBit;
use mobile_gossip::engine::{own_tokens, run_trial, SimConfig};
use mobile_gossip::graph::{generate, GraphKind};

pub fn run_example() -> anyhow::Result<()> {
    let n = 12;
    let topology = generate(&GraphKind::Ring { n }, 0)?;
    let sim = SimConfig::new(n, 16, 1, 5);
    let initial = own_tokens(&sim, 0..n);
    let mut converged = None;
    let (record, engine) = run_trial(
        sim,
        SimSharedBit,
        &topology,
        initial,
        |w, _| w.is_gossip_complete(),
        |o, e| {
            let first = e.states()[0].candidate();
            if converged.is_none() && e.states().iter().all(|s| s.candidate() == first) {
                converged = Some(o.round);
            }
            Ok(())
        },
    )?;
    println!(
        "candidates agreed on UID {} by round {:?}; gossip finished in round {:?}",
        engine.states()[0].candidate(),
        converged,
        record.completion_round
    );
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
