use std::path::Path;
use std::process::{Command, Output};

use relnodes::io::ReportDocument;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relnodes"))
        .args(args)
        .current_dir(dir)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn report(dir: &Path, args: &[&str]) -> ReportDocument {
    let out = run(dir, args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    ReportDocument::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap()
}

const CHAIN: &str = r#"{
  "type": "gaussian-bn",
  "variables": ["A", "B", "T"],
  "edges": [["A", "B"], ["B", "T"]],
  "coefficients": {"A->B": 1.0, "B->T": 1.0},
  "noise_variances": {"A": 1.0, "B": 1.0, "T": 1.0}
}"#;

#[test]
fn chain_graph_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("chain.json"), CHAIN).unwrap();
    let r = report(
        dir.path(),
        &["ug", "--model", "chain.json", "--targets", "T", "--dot", "g.dot"],
    );
    let g = r.graph.unwrap();
    assert_eq!(
        g.edges,
        vec![("A".to_string(), "B".to_string()), ("B".to_string(), "T".to_string())]
    );
    let dot = std::fs::read_to_string(dir.path().join("g.dot")).unwrap();
    let edge_lines: Vec<&str> = dot.lines().map(str::trim).filter(|l| l.contains("--")).collect();
    assert_eq!(edge_lines, ["A -- B;", "B -- T;"]);
}

#[test]
fn chain_hiding_and_blocking() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("chain.json"), CHAIN).unwrap();
    let r = report(
        dir.path(),
        &["axioms", "--model", "chain.json", "--hide", "B", "--check", "symmetry"],
    );
    assert!(r.axioms.iter().all(|a| a.violations.is_empty()));
    let r = report(
        dir.path(),
        &["relevant", "--model", "chain.json", "--targets", "T", "--context", "B"],
    );
    assert!(r.relevance.unwrap().relevant.is_empty());
}

#[test]
fn selection_example_relevance() {
    let dir = tempfile::tempdir().unwrap();
    report(
        dir.path(),
        &["synth", "--fixture", "selection", "--out-model", "sel.json"],
    );
    let r = report(dir.path(), &["relevant", "--model", "sel.json", "--targets", "T"]);
    assert_eq!(r.relevance.unwrap().relevant, ["C1", "C2", "I"]);
    let r = report(
        dir.path(),
        &["oracle", "--model", "sel.json", "--targets", "T", "--compare"],
    );
    assert_eq!(r.agreement, Some(true));
    let r = report(
        dir.path(),
        &["purge", "--model", "sel.json", "--targets", "T", "--context", "C1,C2,I"],
    );
    let p = r.purge.unwrap();
    assert_eq!(p.context, ["C1", "C2"]);
    assert_eq!(p.removed.len(), 1);
}

#[test]
fn xor_slice_violates_composition_only_there() {
    let dir = tempfile::tempdir().unwrap();
    report(dir.path(), &["synth", "--fixture", "xor-or", "--out-model", "xor.json"]);
    let r = report(
        dir.path(),
        &[
            "axioms",
            "--model",
            "xor.json",
            "--condition",
            "W=0",
            "--check",
            "composition",
        ],
    );
    assert!(!r.axioms[0].violations.is_empty());
    let r = report(dir.path(), &["axioms", "--model", "xor.json", "--check", "composition"]);
    assert!(r.axioms[0].violations.is_empty());
}

#[test]
fn all_columns_as_targets_leave_nothing_relevant() {
    let dir = tempfile::tempdir().unwrap();
    report(
        dir.path(),
        &[
            "synth",
            "--nodes",
            "5",
            "--seed",
            "2",
            "--out-model",
            "m.json",
            "--samples",
            "300",
            "--out-data",
            "d.csv",
        ],
    );
    let r = report(
        dir.path(),
        &["relevant", "--data", "d.csv", "--targets", "X0,X1,X2,X3,X4"],
    )
    .relevance
    .unwrap();
    assert!(r.relevant.is_empty() && r.irrelevant.is_empty());
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("chain.json"), CHAIN).unwrap();
    let out = run(dir.path(), &["relevant", "--model", "chain.json", "--targets", "Q,T,Z"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains('Q') && err.contains('Z'), "{err}");
    for args in [
        &["relevant", "--data", "missing.csv", "--targets", "X0"][..],
        &["relevant", "--model", "chain.json", "--targets", "T", "--context", "T"],
        &[
            "relevant",
            "--model",
            "chain.json",
            "--targets",
            "T",
            "--condition",
            "B",
        ],
        &[
            "relevant",
            "--model",
            "chain.json",
            "--targets",
            "T",
            "--test",
            "fisher-z",
        ],
        &[
            "purge",
            "--model",
            "chain.json",
            "--targets",
            "T",
            "--context",
            "A",
            "--alpha",
            "1.5",
        ],
        &["axioms", "--model", "chain.json", "--check", "associativity"],
    ] {
        assert_eq!(run(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}
