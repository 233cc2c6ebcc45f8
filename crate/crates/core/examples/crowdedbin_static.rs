//! CrowdedBin gossips without knowing k: random tags are spelled bin by bin
//! and each spelled tag is followed by a short PPUSH burst for its token.

use mobile_gossip::algorithms::crowdedbin::{configuration, is_good_configuration, Layout};
use mobile_gossip::algorithms::{CrowdedBin, CrowdedBinParams};
use mobile_gossip::engine::{own_tokens, run_trial, SimConfig};
use mobile_gossip::graph::{generate, GraphKind};

pub fn run_example() -> anyhow::Result<()> {
    let params = CrowdedBinParams::default();
    let log_n = 4;
    for j in 1..=log_n {
        let layout = Layout::new(1 << j, &params, log_n);
        println!(
            "instance {j}: phase length {} instance rounds",
            layout.phase_len
        );
    }
    let n = 12;
    let topology = generate(&GraphKind::Complete { n }, 0)?;
    let sim = SimConfig::new(n, 16, 1, 2);
    let initial = own_tokens(&sim, 0..n);
    let (record, engine) = run_trial(
        sim,
        CrowdedBin::new(params),
        &topology,
        initial,
        |w, _| w.is_gossip_complete(),
        |_, _| Ok(()),
    )?;
    let (tags, bins) = configuration(engine.states());
    let good = is_good_configuration(&tags, &bins, n, log_n, &params);
    let max_est = engine.states().iter().map(|s| s.est()).max().unwrap_or(1);
    println!(
        "finished in round {:?}; good configuration: {} (target instance {:?}); largest estimate {max_est}",
        record.completion_round, good.good, good.target
    );
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
