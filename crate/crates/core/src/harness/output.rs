use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use super::config::ExperimentConfig;
use super::experiment::{ExperimentResult, TrialResult};
use super::HarnessError;
use crate::engine::RoundOutcome;

/// Environment variable naming the directory for output files when no
/// explicit path is given.
pub const OUT_DIR_ENV: &str = "MOBILE_GOSSIP_OUT_DIR";

/// Output directory from [`OUT_DIR_ENV`], if set and non-empty.
pub fn default_out_dir() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

const BASE_COLUMNS: [&str; 11] = [
    "trial",
    "completion_round",
    "eps_completion_round",
    "dnf",
    "rounds_run",
    "connections",
    "bits_total",
    "phi_initial",
    "active_rounds",
    "progress_rounds",
    "trace_hash",
];

fn opt(v: Option<u64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// One row per trial; algorithm columns follow the fixed ones in name order.
pub fn write_csv<W: Write>(out: W, records: &[TrialResult]) -> Result<(), HarnessError> {
    let extra: BTreeSet<&str> = records
        .iter()
        .flat_map(|r| r.extras.keys().map(String::as_str))
        .collect();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BASE_COLUMNS.iter().copied().chain(extra.iter().copied()))?;
    for r in records {
        let mut row = vec![
            r.trial.to_string(),
            opt(r.completion_round),
            opt(r.eps_completion_round),
            r.dnf().to_string(),
            r.rounds_run.to_string(),
            r.connections.to_string(),
            r.bits_total.to_string(),
            r.phi_initial.to_string(),
            r.active_rounds.to_string(),
            r.progress_rounds.to_string(),
            r.trace_hash.clone(),
        ];
        row.extend(
            extra
                .iter()
                .map(|k| r.extras.get(*k).cloned().unwrap_or_default()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Summary document: the effective config, aggregate statistics and φ
/// trajectories. `generated_at` is omitted in deterministic mode.
pub fn summary_json(
    config: &ExperimentConfig,
    result: &ExperimentResult,
) -> Result<Value, HarnessError> {
    let mut doc = json!({
        "config": serde_json::to_value(config)?,
        "summary": serde_json::to_value(&result.summary)?,
        "phi_trajectories": result
            .records
            .iter()
            .map(|r| json!({ "trial": r.trial, "points": r.phi_trajectory }))
            .collect::<Vec<_>>(),
    });
    if !config.deterministic {
        let secs = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        doc["generated_at"] = json!(secs);
    }
    Ok(doc)
}

/// One trace line describing a round.
pub fn outcome_json(o: &RoundOutcome) -> Value {
    json!({
        "round": o.round,
        "tags": o.tags.iter().map(|t| t.bits()).collect::<Vec<_>>(),
        "proposals": o.proposals,
        "matching": o.matching,
        "bits_used": o.bits_used,
        "transfers": o
            .transfers
            .iter()
            .map(|m| [m.token.get() as usize, m.from, m.to])
            .collect::<Vec<_>>(),
        "phi_before": o.phi_before,
        "phi_after": o.phi_after,
    })
}
