//! Static and dynamic topologies, graph generators, and the structural
//! quantities the protocols are analysed against: vertex expansion, maximum
//! degree, and diameter.

mod dynamic;
mod expansion;
mod generate;
mod io;
mod topology;

pub use dynamic::{DynamicTopology, Snapshot, StabilityReport, Tau};
pub use expansion::{
    diameter, max_degree, vertex_expansion_estimate, vertex_expansion_exact, EXACT_EXPANSION_LIMIT,
};
pub use generate::{generate, GraphKind};
pub use io::GraphFile;
pub use topology::StaticTopology;

use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph has {n} nodes; exact computation is limited to {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge endpoint {node} out of range for n = {n}")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("could not generate a connected {kind} graph after {attempts} attempts")]
    GenerationFailed { kind: &'static str, attempts: usize },
    #[error("invalid dynamic topology: {0}")]
    InvalidDynamic(String),
    #[error("graph file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph file: {0}")]
    Io(#[from] std::io::Error),
}

/// Summary quantities of a static or dynamic topology.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub alpha: f64,
    /// Exact rational value when it was computed by enumeration.
    pub alpha_exact: Option<Ratio<u64>>,
    pub delta: usize,
    /// Defined for single-snapshot topologies only.
    pub diameter: Option<usize>,
}

impl GraphStats {
    pub fn alpha_is_estimate(&self) -> bool {
        self.alpha_exact.is_none()
    }
}
