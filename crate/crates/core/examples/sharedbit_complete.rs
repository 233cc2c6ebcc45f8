//! SharedBit: a preshared random string lets nodes compare token sets with
//! a single advertised bit, so connections only form where they help.

use mobile_gossip::algorithms::SharedBit;
use mobile_gossip::engine::{own_tokens, run_trial, SimConfig};
use mobile_gossip::graph::{generate, GraphKind};
use mobile_gossip::randomness::{Seed, SharedString};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> anyhow::Result<()> {
    let n = 16;
    let topology = generate(&GraphKind::Complete { n }, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let seed = Seed::random(16, &mut rng);
    let string = SharedString::from_seed(16, &seed)?;
    println!(
        "shared seed {} expands to {} groups of {} bits",
        seed.to_hex(),
        string.groups(),
        string.bundle_bits()
    );
    let sim = SimConfig::new(n, 16, 1, 11);
    let initial = own_tokens(&sim, 0..n);
    let (record, engine) = run_trial(
        sim,
        SharedBit::new(string),
        &topology,
        initial,
        |w, _| w.is_gossip_complete(),
        |_, _| Ok(()),
    )?;
    println!(
        "gossip of {n} tokens finished in round {:?} with {} connections; {} of {} active rounds made progress; wraps={}",
        record.completion_round,
        record.connections,
        record.progress_rounds,
        record.active_rounds,
        engine.behavior().wraps()
    );
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
