//! Relaxed completion: a set of at least εn nodes that all know each
//! other's tokens, and the coalition built from the frequency multiset.

use mobile_gossip::metrics::{coalition, frequency_multiset, is_eps_gossip_complete, potential};
use mobile_gossip::tokens::{TokenSet, Uid};

pub fn run_example() -> anyhow::Result<()> {
    let sets: Vec<TokenSet> = [
        vec![1, 2],
        vec![1, 2],
        vec![3, 4],
        vec![3, 4],
        vec![5],
        vec![6],
    ]
    .into_iter()
    .map(|t| TokenSet::from_tokens(8, t))
    .collect();
    let owners: Vec<Uid> = (1..=6).map(Uid).collect();
    println!("potential with k=6: {}", potential(&sets, 6));
    for eps in [0.3, 0.5] {
        println!(
            "eps={eps}: complete = {}",
            is_eps_gossip_complete(&sets, &owners, eps)?
        );
    }
    let f = frequency_multiset(&sets);
    println!("frequency multiset: {:?}", f.entries);
    println!("coalition at eps=0.5: {:?}", coalition(&f, sets.len(), 0.5));
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
