//! Topology families and their expansion, degree and diameter.

use mobile_gossip::graph::{generate, GraphKind};

pub fn run_example() -> anyhow::Result<()> {
    let kinds = [
        GraphKind::Complete { n: 8 },
        GraphKind::Ring { n: 8 },
        GraphKind::Star { n: 8 },
        GraphKind::TwoStars { delta: 3 },
        GraphKind::RandomRegular { n: 12, d: 3 },
        GraphKind::FreshRandomEachTau {
            n: 10,
            p: 0.4,
            tau: 3,
        },
    ];
    for kind in &kinds {
        let topology = generate(kind, 7)?;
        let stats = topology.stats(500, 7)?;
        let alpha = match stats.alpha_exact {
            Some(a) => format!("{a}"),
            None => format!("~{:.3}", stats.alpha),
        };
        let diameter = stats.diameter.map_or("-".to_string(), |d| d.to_string());
        println!(
            "{:<24} alpha={alpha:<6} delta={:<3} diameter={diameter}",
            kind.name(),
            stats.delta
        );
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
