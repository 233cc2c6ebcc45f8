//! The `mobile-gossip` binary: outputs, determinism and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use mobile_gossip::graph::{generate, GraphFile, GraphKind};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mobile-gossip"))
        .args(args)
        .env_remove("MOBILE_GOSSIP_OUT_DIR")
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    bin(args).status.code().unwrap()
}

fn run_to(dir: &Path, name: &str, extra: &[&str]) -> (Vec<u8>, Vec<u8>) {
    let csv = dir.join(format!("{name}.csv"));
    let summary = dir.join(format!("{name}.json"));
    let mut args = vec![
        "run",
        "--deterministic",
        "--out",
        csv.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = bin(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    (std::fs::read(csv).unwrap(), std::fs::read(summary).unwrap())
}

const SHAREDBIT: &[&str] = &[
    "--alg",
    "sharedbit",
    "--graph",
    "fresh_random_each_tau",
    "--n",
    "12",
    "--p",
    "0.3",
    "--tau",
    "2",
    "--trials",
    "6",
    "--seed",
    "17",
    "--epsilon",
    "0.5",
];

#[test]
fn deterministic_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_to(dir.path(), "a", SHAREDBIT);
    let b = run_to(dir.path(), "a", SHAREDBIT);
    assert!(a == b, "reruns differ");
    let text = String::from_utf8(a.0).unwrap();
    assert!(text.starts_with("trial,completion_round,eps_completion_round,dnf,"));
    assert_eq!(text.lines().count(), 7);
    assert!(!String::from_utf8(a.1).unwrap().contains("generated_at"));
}

#[test]
fn replay_reproduces_trace_hashes() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, _) = run_to(dir.path(), "r", SHAREDBIT);
    let mut reader = csv::Reader::from_reader(csv.as_slice());
    let headers = reader.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "trace_hash").unwrap();
    for (i, row) in reader.records().enumerate() {
        let trace = dir.path().join(format!("t{i}.jsonl"));
        let trial = i.to_string();
        let mut args = vec![
            "replay",
            "--trial",
            &trial,
            "--trace",
            trace.to_str().unwrap(),
        ];
        args.extend_from_slice(SHAREDBIT);
        let out = bin(&args);
        assert!(out.status.success());
        let stdout = String::from_utf8(out.stdout).unwrap();
        assert!(
            stdout.contains(&format!("trace_hash={}", &row.unwrap()[col])),
            "{stdout}"
        );
        let lines = std::fs::read_to_string(&trace).unwrap();
        let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
        assert_eq!(first["round"], 1);
    }
}

#[test]
fn config_file_and_flags_merge() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"alg": "blindmatch", "graph": "two_stars", "delta": 4, "k": 1, "stop_node": 1, "trials": 3, "seed": 5}"#,
    )
    .unwrap();
    let from_file = run_to(dir.path(), "f", &["--config", cfg.to_str().unwrap()]);
    let from_flags = run_to(
        dir.path(),
        "g",
        &[
            "--alg",
            "blindmatch",
            "--graph",
            "two_stars",
            "--delta",
            "4",
            "--k",
            "1",
            "--stop-node",
            "1",
            "--trials",
            "3",
            "--seed",
            "5",
        ],
    );
    assert!(
        from_file.0 == from_flags.0,
        "config file and flags disagree"
    );
    let overridden = run_to(
        dir.path(),
        "h",
        &["--config", cfg.to_str().unwrap(), "--seed", "6"],
    );
    assert!(
        overridden.0 != from_file.0,
        "--seed did not override the file"
    );

    std::fs::write(&cfg, r#"{"alg": "blindmatch", "colour": 1}"#).unwrap();
    assert_eq!(code(&["run", "--config", cfg.to_str().unwrap()]), 1);
}

#[test]
fn graph_stats_on_a_ring_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring8.json");
    GraphFile::save(&generate(&GraphKind::Ring { n: 8 }, 0).unwrap(), &path).unwrap();
    let out = bin(&["graph", "stats", "--file", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "alpha=0.5 delta=2 diameter=4"
    );
}

#[test]
fn graph_gen_writes_loadable_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fresh.json");
    let out = bin(&[
        "graph",
        "gen",
        "--graph",
        "fresh_random_each_tau",
        "--n",
        "10",
        "--p",
        "0.4",
        "--tau",
        "3",
        "--rounds",
        "12",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let t = GraphFile::load(&path).unwrap();
    assert_eq!(t.n(), 10);
    assert_eq!(t.snapshots().unwrap().len(), 4);
    let stats = bin(&["graph", "stats", "--file", path.to_str().unwrap()]);
    assert!(String::from_utf8(stats.stdout)
        .unwrap()
        .contains("diameter=n/a"));
}

#[test]
fn exit_codes() {
    assert_eq!(
        code(&["run", "--alg", "ppush", "--graph", "complete", "--n", "8", "--k", "8"]),
        1
    );
    assert_eq!(
        code(&[
            "run",
            "--alg",
            "sharedbit",
            "--graph",
            "complete",
            "--n",
            "8",
            "--k",
            "9"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "run",
            "--alg",
            "crowdedbin",
            "--graph",
            "fresh_random_each_tau",
            "--n",
            "8",
            "--p",
            "0.5",
            "--tau",
            "2"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "run",
            "--alg",
            "sharedbit",
            "--graph",
            "complete",
            "--n",
            "6",
            "--uid-space",
            "6"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "run",
            "--alg",
            "sharedbit",
            "--graph",
            "complete",
            "--n",
            "6",
            "--epsilon",
            "1.5"
        ]),
        1
    );
    assert_eq!(code(&["run", "--no-such-flag"]), 1);
    assert_eq!(
        code(&["graph", "stats", "--file", "/nonexistent/ring.json"]),
        1
    );
    assert_eq!(code(&["--help"]), 0);

    let dir = tempfile::tempdir().unwrap();
    let as_dir = dir.path().to_str().unwrap();
    assert_eq!(
        code(&[
            "run",
            "--alg",
            "sharedbit",
            "--graph",
            "complete",
            "--n",
            "4",
            "--out",
            as_dir
        ]),
        2
    );
    assert_eq!(
        code(&[
            "run",
            "--alg",
            "blindmatch",
            "--graph",
            "ring",
            "--n",
            "8",
            "--max-rounds",
            "3"
        ]),
        0
    );
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mobile-gossip"))
        .args([
            "run",
            "--alg",
            "blindmatch",
            "--graph",
            "complete",
            "--n",
            "4",
            "--deterministic",
        ])
        .env("MOBILE_GOSSIP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(dir.path().join("results.csv").exists());
    assert!(dir.path().join("summary.json").exists());
}
