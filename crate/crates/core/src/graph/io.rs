//! JSON graph files:
//! `{"n": int, "tau": int|"inf", "snapshots": [{"from_round": int, "edges": [[u,v],...]}]}`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{DynamicTopology, GraphError, Snapshot, StaticTopology, Tau};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub tau: Tau,
    pub snapshots: Vec<SnapshotFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotFile {
    pub from_round: u64,
    pub edges: Vec<[usize; 2]>,
}

impl GraphFile {
    /// Lazily generated topologies must be materialized first.
    pub fn from_topology(topology: &DynamicTopology) -> Result<Self, GraphError> {
        let snapshots = topology.snapshots().ok_or_else(|| {
            GraphError::InvalidDynamic("materialize the topology before exporting".into())
        })?;
        Ok(Self {
            n: topology.n(),
            tau: topology.tau(),
            snapshots: snapshots
                .iter()
                .map(|s| SnapshotFile {
                    from_round: s.from_round,
                    edges: s.graph.edges().map(|(u, v)| [u, v]).collect(),
                })
                .collect(),
        })
    }

    /// Enforces every topology invariant, including stability.
    pub fn into_topology(self) -> Result<DynamicTopology, GraphError> {
        let snapshots = self
            .snapshots
            .into_iter()
            .map(|s| {
                let graph =
                    StaticTopology::from_edges(self.n, s.edges.iter().map(|e| (e[0], e[1])))?;
                Ok(Snapshot {
                    from_round: s.from_round,
                    graph: Arc::new(graph),
                })
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        let topology = DynamicTopology::from_snapshots(self.tau, snapshots)?;
        let report = topology.validate_stability();
        if !report.ok {
            return Err(GraphError::InvalidDynamic(report.reasons.join("; ")));
        }
        Ok(topology)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<DynamicTopology, GraphError> {
        let text = std::fs::read_to_string(path)?;
        let file: GraphFile = serde_json::from_str(&text)?;
        file.into_topology()
    }

    pub fn save(topology: &DynamicTopology, path: impl AsRef<Path>) -> Result<(), GraphError> {
        let file = Self::from_topology(topology)?;
        std::fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?;
        Ok(())
    }
}
