use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netregress"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("stdout is JSON")
}

fn edge_lines(path: &Path) -> usize {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .count()
}

#[test]
fn gen_writes_snapshot_files() {
    let dir = tempfile::tempdir().unwrap();
    let summary = json(&ok(
        dir.path(),
        &["gen", "(pow k k)", "--nodes", "300", "--edges", "3000", "--snapshots", "0.5,1.0", "--seed", "7", "-o", "a"],
    ));
    assert_eq!(summary["seed"], 7);
    assert_eq!(summary["edges"], 3000);
    assert_eq!(edge_lines(&dir.path().join("a.xi0.50")), 1500);
    assert_eq!(edge_lines(&dir.path().join("a.xi1.00")), 3000);
    assert!(fs::read_to_string(dir.path().join("a.xi0.50")).unwrap().starts_with("# seed=7"));
}

#[test]
fn gen_complete_graph() {
    let dir = tempfile::tempdir().unwrap();
    let summary = json(&ok(dir.path(), &["gen", "1", "--nodes", "10", "--edges", "45", "-o", "k10"]));
    assert_eq!(summary["max_degree"], 9);
    assert_eq!(summary["census"]["triangle"], 120);
    assert!(summary["seed"].is_u64());
}

#[test]
fn gen_syntax_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["gen", "(+ k", "--nodes", "10", "--edges", "5", "-o", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("byte 4"));
}

#[test]
fn config_file_and_flag_errors() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.cfg"), "bins = 10\nbogus = 1\n").unwrap();
    let out = run(dir.path(), &["gen", "1", "--nodes", "10", "--edges", "5", "-o", "x", "--config", "bad.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    let out = run(dir.path(), &["gen", "1", "--nodes", "10", "--edges", "5", "-o", "x", "--set", "bins=zero"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(dir.path(), &["gen", "1", "--nodes", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_self_is_zero_and_errors_are_user_errors() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "k", "--nodes", "80", "--edges", "300", "--seed", "1", "-o", "t"]);
    let report = json(&ok(dir.path(), &["fit", "t", "t", "--seed", "2"]));
    assert_eq!(report["fitness"], 0.0);
    assert!(report["degree"]["ratio"].is_number());

    let out = run(dir.path(), &["fit", "t", "missing.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.txt"));

    ok(dir.path(), &["gen", "k", "--nodes", "80", "--edges", "300", "--directed", "--seed", "1", "-o", "dt"]);
    let out = run(dir.path(), &["fit", "t", "dt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_er_against_er_is_near_one() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "1", "--nodes", "100", "--edges", "400", "--seed", "3", "-o", "er"]);
    let mut inside = 0;
    for seed in 0..10 {
        let report = json(&ok(
            dir.path(),
            &["fit", "er", "1", "--seed", &seed.to_string(), "--baseline-cache", "er.baseline"],
        ));
        let f = report["fitness"].as_f64().unwrap();
        if (0.5..=1.6).contains(&f) {
            inside += 1;
        }
    }
    assert!(inside >= 6, "{inside}/10 ER fitness values in [0.5, 1.6]");
}

#[test]
fn baseline_cache_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "k", "--nodes", "60", "--edges", "200", "--seed", "1", "-o", "t"]);
    let fresh = ok(dir.path(), &["fit", "t", "1", "--seed", "5", "--baseline-cache", "b.json"]);
    assert!(dir.path().join("b.json").exists());
    let cached = ok(dir.path(), &["fit", "t", "1", "--seed", "5", "--baseline-cache", "b.json"]);
    assert_eq!(fresh, cached);
    let stored = json(&ok(dir.path(), &["baseline", "t", "--seed", "5"]));
    let cache: Value = json(&fs::read_to_string(dir.path().join("b.json")).unwrap());
    assert_eq!(stored, cache);
}

#[test]
fn evolve_logs_are_deterministic_with_snapshot_columns() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "k", "--nodes", "60", "--edges", "200", "--snapshots", "0.5,1.0", "--seed", "4", "-o", "a"]);
    let args = ["evolve", "--targets", "a.xi0.50,a.xi1.00", "--seed", "13", "--max-steps", "12"];
    let first = ok(dir.path(), &args);
    let second = ok(dir.path(), &args);
    assert_eq!(first, second);
    let mut lines = first.lines();
    assert_eq!(lines.next(), Some("# seed=13"));
    assert_eq!(
        lines.next(),
        Some("step,proposal,accepted_slots,fitness_s1,fitness_s2,mean_dissim,tree_size")
    );
    assert_eq!(lines.count(), 13);
}

#[test]
fn evolve_without_recombination_only_mutates() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "k", "--nodes", "60", "--edges", "200", "--seed", "4", "-o", "t"]);
    ok(
        dir.path(),
        &["evolve", "--targets", "t", "--seed", "1", "--max-steps", "15", "--no-recombination", "--log", "log.csv", "-o", "run"],
    );
    let log = fs::read_to_string(dir.path().join("log.csv")).unwrap();
    let proposals: Vec<&str> = log.lines().skip(2).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(proposals[0], "init");
    assert!(proposals[1..].iter().all(|&p| p == "mutate"));
    for ext in ["best", "simplified"] {
        let text = fs::read_to_string(dir.path().join(format!("run.{ext}"))).unwrap();
        netregress::dsl::GeneratorTree::parse(text.trim()).unwrap();
    }
    let summary = json(&fs::read_to_string(dir.path().join("run.json")).unwrap());
    assert_eq!(summary["seed"], 1);
}

#[test]
fn evolve_from_initial_network() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["gen", "k", "--nodes", "60", "--edges", "200", "--snapshots", "0.5,1.0", "--seed", "4", "-o", "a"]);
    let log = ok(dir.path(), &["evolve", "--targets", "a.xi1.00", "--initial", "a.xi0.50", "--seed", "2", "--max-steps", "5"]);
    assert!(log.lines().nth(1).unwrap().ends_with("fitness_s1,mean_dissim,tree_size"));
    let out = run(dir.path(), &["evolve", "--targets", "a.xi0.50,a.xi1.00", "--initial", "a.xi0.50", "--max-steps", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_specs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.json"), "{}").unwrap();
    assert_eq!(ok(dir.path(), &["experiment", "empty.json"]), "experiment,group,xi,quantity,value,runs\n");

    fs::write(
        dir.path().join("bad.json"),
        r#"{"experiments": [{"kind": "rw_benchmark", "nodes": 10, "edges": 20, "colour": 1}]}"#,
    )
    .unwrap();
    let out = run(dir.path(), &["experiment", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    fs::write(
        dir.path().join("delta.json"),
        r#"{"experiments": [{"kind": "delta_distinctiveness", "nodes": 40, "edges": 150, "targets": 1, "runs": 2}]}"#,
    )
    .unwrap();
    let csv = ok(dir.path(), &["experiment", "delta.json", "--threads", "1", "--json", "r.json"]);
    let fitness_rows = csv.lines().filter(|l| l.contains(",mean_fitness,")).count();
    // three comparison kinds at each of two ratios
    assert_eq!(fitness_rows, 6);
    assert!(json(&fs::read_to_string(dir.path().join("r.json")).unwrap())["rows"].is_array());
}

#[test]
fn census_and_distcheck() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cycle"), "0 1\n1 2\n2 0\n").unwrap();
    let c = json(&ok(dir.path(), &["census", "cycle", "--directed"]));
    assert_eq!(c["census"]["030C"], 1);
    let c = json(&ok(dir.path(), &["census", "cycle"]));
    assert_eq!(c["census"]["triangle"], 1);

    let csv = ok(dir.path(), &["distcheck", "--nodes", "60", "--edges", "200", "--checkpoints", "4", "--seed", "3"]);
    assert!(csv.starts_with("# seed=3\nexperiment,group,xi,quantity,value,runs\n"));
    assert_eq!(csv.lines().filter(|l| l.contains("correct_fraction")).count(), 8);
}
