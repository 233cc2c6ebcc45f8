//! Round-based simulation of gossip in the mobile telephone model.
//!
//! Nodes on a (possibly changing) connected graph advertise short tags,
//! scan their neighbors, and form at most one pairwise connection per round.
//! The crate provides the engine, the graph families and structural
//! quantities, the token transfer subroutine, five gossip behaviors, the
//! completion metrics, and an experiment harness with a CLI.

pub mod algorithms;
pub mod engine;
pub mod graph;
pub mod harness;
pub mod metrics;
pub mod randomness;
pub mod rng;
pub mod tokens;
pub mod transfer;
