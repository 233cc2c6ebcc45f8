//! The experiment harness: a config drives seeded parallel trials and
//! yields per-trial CSV rows plus a summary.

use mobile_gossip::harness::{run_experiment, write_csv, Algorithm, ExperimentConfig, GraphName};

pub fn run_example() -> anyhow::Result<()> {
    let cfg = ExperimentConfig {
        alg: Some(Algorithm::Sharedbit),
        graph: Some(GraphName::Complete),
        n: Some(8),
        trials: Some(4),
        seed: Some(42),
        ..ExperimentConfig::default()
    };
    let result = run_experiment(&cfg.resolve()?)?;
    write_csv(std::io::stdout().lock(), &result.records)?;
    println!("{}", serde_json::to_string_pretty(&result.summary)?);
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
