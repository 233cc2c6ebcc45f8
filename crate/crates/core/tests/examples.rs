//! Every example runs to completion.

#[allow(dead_code)]
#[path = "../examples/blindmatch_two_stars.rs"]
mod blindmatch_two_stars;

#[test]
fn example_blindmatch_two_stars() {
    blindmatch_two_stars::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/crowdedbin_static.rs"]
mod crowdedbin_static;

#[test]
fn example_crowdedbin_static() {
    crowdedbin_static::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/eps_gossip.rs"]
mod eps_gossip;

#[test]
fn example_eps_gossip() {
    eps_gossip::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/experiment_csv.rs"]
mod experiment_csv;

#[test]
fn example_experiment_csv() {
    experiment_csv::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/graph_stats.rs"]
mod graph_stats;

#[test]
fn example_graph_stats() {
    graph_stats::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/ppush_expansion.rs"]
mod ppush_expansion;

#[test]
fn example_ppush_expansion() {
    ppush_expansion::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/sharedbit_complete.rs"]
mod sharedbit_complete;

#[test]
fn example_sharedbit_complete() {
    sharedbit_complete::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/simsharedbit_ring.rs"]
mod simsharedbit_ring;

#[test]
fn example_simsharedbit_ring() {
    simsharedbit_ring::run_example().unwrap();
}

#[allow(dead_code)]
#[path = "../examples/transfer_demo.rs"]
mod transfer_demo;

#[test]
fn example_transfer_demo() {
    transfer_demo::run_example().unwrap();
}
