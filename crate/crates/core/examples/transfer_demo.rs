//! The transfer subroutine: two parties locate the smallest token only one
//! of them holds, exchanging fingerprints instead of sets.

use mobile_gossip::tokens::TokenSet;
use mobile_gossip::transfer::{transfer, TransferParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> anyhow::Result<()> {
    let params = TransferParams::new(64, 0.01)?;
    println!(
        "N=64 eps=0.01: q={} trials={} bit bound={}",
        params.field().modulus(),
        params.trials(),
        params.bit_bound()
    );
    let u = TokenSet::from_tokens(64, [3, 9, 17, 40]);
    let v = TokenSet::from_tokens(64, [3, 9, 21, 40, 63]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let out = transfer(&u, &v, &params, &mut rng);
    println!(
        "u={u:?} v={v:?} -> {:?} using {} bits over {} equality tests",
        out.moved, out.bits_used, out.eq_calls
    );
    let same = transfer(&u, &u.clone(), &params, &mut rng);
    println!("equal sets -> {:?}", same.moved);
    Ok(())
}

fn main() -> anyhow::Result<()> {
    run_example()
}
