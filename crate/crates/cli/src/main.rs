//! `netregress` command-line tool.
//!
//! Exit codes: 0 success, 2 user error (bad flags, files, config or
//! generator text), 3 internal error.
//!
//! Fitness reports are flat JSON objects: one `{raw, baseline, ratio}` entry
//! per metric key (`degree`, `in_degree`, `out_degree`, `pagerank`,
//! `pagerank_direct`, `pagerank_reverse`, `undirected_distance`,
//! `directed_distance`, `triad_census`) plus `fitness` and
//! `mean_dissimilarity`.

use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use netregress::config::Settings;
use netregress::dsl::{classify, GeneratorTree};
use netregress::evolve::{evolve_from_initial_prepared, evolve_prepared, RunLog, StepRecord};
use netregress::experiment::{run_experiment, Experiment, ExperimentSpec, RwBenchmark};
use netregress::graph::{read_edge_list, triad_census, write_edge_list, DegreeKind, Network};
use netregress::metrics::{null_baseline, NullBaseline, TargetEvaluator};
use netregress::netgen::generate;

enum Failure {
    User(String),
    Internal(String),
}

impl From<netregress::Error> for Failure {
    fn from(e: netregress::Error) -> Self {
        match e {
            netregress::Error::Internal(_) => Failure::Internal(e.to_string()),
            _ => Failure::User(e.to_string()),
        }
    }
}

type Outcome<T = ()> = Result<T, Failure>;

fn user<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::User(msg.into()))
}

#[derive(Parser)]
#[command(name = "netregress", version, about = "Find generators that grow networks like a target")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a network from a generator and write it as an edge list.
    Gen(GenArgs),
    /// Score a candidate network or generator against a target.
    Fit(FitArgs),
    /// Compute and store the random-network baseline of a target.
    Baseline(BaselineArgs),
    /// Search for a generator that reproduces one or more target snapshots.
    Evolve(EvolveArgs),
    /// Run a batch experiment described by a JSON spec.
    Experiment(ExperimentArgs),
    /// Print the triad census of an edge list.
    Census(CensusArgs),
    /// Measure how often random-walk distance estimates are exact during growth.
    Distcheck(DistcheckArgs),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra config overrides, `key=value`, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Random seed; drawn from entropy and reported when omitted.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn settings(&self) -> Outcome<Settings> {
        let mut s = match &self.config {
            Some(path) => Settings::parse(&read_text(path)?)?,
            None => Settings::default(),
        };
        for kv in &self.set {
            let Some((k, v)) = kv.split_once('=') else {
                return user(format!("--set expects key=value, got {kv:?}"));
            };
            let k = k.trim();
            if !netregress::config::KEYS.contains(&k) {
                return user(format!("unknown config key {k}"));
            }
            s.set(k, v.trim())?;
        }
        s.validate()?;
        Ok(s)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(rand::random)
    }
}

#[derive(Args)]
struct GenArgs {
    /// Generator in prefix syntax, e.g. "(pow k k)".
    generator: String,
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    edges: usize,
    #[arg(long)]
    directed: bool,
    /// Comma-separated edge ratios to save, ending at 1.0.
    #[arg(long, value_delimiter = ',')]
    snapshots: Vec<f64>,
    /// Output path; snapshots are written to `<out>.xi<ratio>`.
    #[arg(long, short)]
    out: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct FitArgs {
    /// Target edge list.
    target: PathBuf,
    /// Candidate edge list, or a generator grown to the target's size.
    candidate: String,
    /// Baseline JSON file: read when present, written otherwise.
    #[arg(long)]
    baseline_cache: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BaselineArgs {
    target: PathBuf,
    /// Write the baseline here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EvolveArgs {
    /// Comma-separated target snapshots, earliest first. Ratios are read
    /// from `.xi<ratio>` suffixes unless `--ratios` is given.
    #[arg(long, value_delimiter = ',', required = true)]
    targets: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    ratios: Vec<f64>,
    /// Grow candidates from this network instead of from an empty one.
    #[arg(long)]
    initial: Option<PathBuf>,
    #[arg(long)]
    no_recombination: bool,
    #[arg(long)]
    stagnation: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Per-step CSV log; stdout when omitted.
    #[arg(long)]
    log: Option<PathBuf>,
    /// Prefix for `<out>.best`, `<out>.simplified` and `<out>.json`.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ExperimentArgs {
    spec: PathBuf,
    /// Long-format CSV results; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Full results, including per-run summaries, as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CensusArgs {
    network: PathBuf,
    /// Treat a headerless edge list as directed.
    #[arg(long)]
    directed: bool,
}

#[derive(Args)]
struct DistcheckArgs {
    /// Generator that reads `d`.
    #[arg(default_value = "d")]
    generator: String,
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    edges: usize,
    /// Walker steps per added edge to compare.
    #[arg(long, value_delimiter = ',', default_value = "1,5")]
    steps: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    checkpoints: usize,
    #[arg(long, default_value_t = 1)]
    runs: usize,
    #[command(flatten)]
    common: Common,
}

fn read_text(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).or_else(|e| user(format!("cannot read {}: {e}", path.display())))
}

fn read_network(path: &Path, directed: Option<bool>) -> Outcome<Network> {
    let file = fs::File::open(path).or_else(|e| user(format!("cannot read {}: {e}", path.display())))?;
    read_edge_list(BufReader::new(file), directed).or_else(|e| user(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Outcome<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .or_else(|e| user(format!("cannot write {}: {e}", path.display())))
}

fn io_failure(e: io::Error) -> Failure {
    Failure::User(format!("write failed: {e}"))
}

fn parse_generator(text: &str) -> Outcome<GeneratorTree> {
    Ok(GeneratorTree::parse(text)?)
}

fn snapshot_path(out: &Path, xi: f64) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(format!(".xi{xi:.2}"));
    PathBuf::from(s)
}

fn write_network(path: &Path, net: &Network, provenance: &str) -> Outcome {
    let mut w = create(path)?;
    writeln!(w, "# {provenance}").map_err(io_failure)?;
    write_edge_list(net, &mut w)?;
    w.flush().map_err(io_failure)
}

fn print_json(value: &serde_json::Value) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Internal(e.to_string()))?;
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(io_failure(e)),
        _ => Ok(()),
    }
}

fn max_degree(net: &Network) -> usize {
    (0..net.node_count() as u32).map(|v| net.total_degree(v)).max().unwrap_or(0)
}

fn census_json(net: &Network) -> Outcome<serde_json::Value> {
    let c = triad_census(net)?;
    let map: serde_json::Map<_, _> = c
        .names()
        .iter()
        .zip(c.counts.iter())
        .map(|(n, v)| (n.to_string(), json!(v)))
        .collect();
    Ok(serde_json::Value::Object(map))
}

fn cmd_gen(a: GenArgs) -> Outcome {
    let s = a.common.settings()?;
    let tree = parse_generator(&a.generator)?;
    let seed = a.common.seed();
    let cfg = s
        .generation_config(a.nodes, a.edges, a.directed, seed)
        .with_snapshots(&a.snapshots);
    let result = generate(&tree, &cfg)?;
    let provenance = format!("seed={seed} generator={}", tree);
    let mut files = Vec::new();
    if result.snapshots.is_empty() {
        write_network(&a.out, &result.network, &provenance)?;
        files.push(json!({"path": a.out, "xi": 1.0, "edges": result.network.edge_count()}));
    } else {
        for snap in &result.snapshots {
            let path = snapshot_path(&a.out, snap.xi);
            write_network(&path, &snap.network, &format!("{provenance} xi={}", snap.xi))?;
            files.push(json!({"path": path, "xi": snap.xi, "edges": snap.network.edge_count()}));
        }
    }
    let net = &result.network;
    print_json(&json!({
        "seed": seed,
        "generator": tree.to_string(),
        "nodes": net.node_count(),
        "edges": net.edge_count(),
        "directed": net.is_directed(),
        "max_degree": max_degree(net),
        "census": census_json(net)?,
        "files": files,
    }))
}

fn load_baseline(path: &Path) -> Outcome<NullBaseline> {
    serde_json::from_str(&read_text(path)?).or_else(|e| user(format!("{}: invalid baseline: {e}", path.display())))
}

fn store_baseline(path: &Path, b: &NullBaseline) -> Outcome {
    let text = serde_json::to_string_pretty(b).map_err(|e| Failure::Internal(e.to_string()))?;
    fs::write(path, text + "\n").or_else(|e| user(format!("cannot write {}: {e}", path.display())))
}

fn cmd_fit(a: FitArgs) -> Outcome {
    let s = a.common.settings()?;
    let seed = a.common.seed();
    let target = read_network(&a.target, None)?;
    let metrics = s.metric_settings();
    let eval = match &a.baseline_cache {
        Some(path) if path.exists() => TargetEvaluator::with_baseline(target.clone(), metrics, load_baseline(path)?)?,
        Some(path) => {
            let e = TargetEvaluator::new(target.clone(), metrics, seed)?;
            store_baseline(path, &e.baseline)?;
            e
        }
        None => TargetEvaluator::new(target.clone(), metrics, seed)?,
    };
    let candidate_path = Path::new(&a.candidate);
    let (candidate, generator) = if candidate_path.exists() {
        (read_network(candidate_path, Some(target.is_directed()))?, None)
    } else {
        let tree = match GeneratorTree::parse(&a.candidate) {
            Ok(t) => t,
            // text that is neither a file nor a generator is most likely a mistyped path
            Err(_) if !a.candidate.trim_start().starts_with('(') => {
                return user(format!("cannot read {}: no such file", a.candidate))
            }
            Err(e) => return Err(e.into()),
        };
        let cfg = s.generation_config(target.node_count(), target.edge_count(), target.is_directed(), seed);
        (generate(&tree, &cfg)?.network, Some(tree.to_string()))
    };
    if candidate.is_directed() != target.is_directed() {
        return user("candidate and target differ in directedness");
    }
    let report = eval.score(&candidate)?;
    let mut out = report.to_json();
    out["seed"] = json!(seed);
    if let Some(g) = generator {
        out["generator"] = json!(g);
    }
    print_json(&out)
}

fn cmd_baseline(a: BaselineArgs) -> Outcome {
    let s = a.common.settings()?;
    let target = read_network(&a.target, None)?;
    let b = null_baseline(&target, &s.metric_settings(), a.common.seed())?;
    match &a.out {
        Some(path) => store_baseline(path, &b),
        None => print_json(&serde_json::to_value(&b).map_err(|e| Failure::Internal(e.to_string()))?),
    }
}

/// Edge ratio encoded in a `.xi<ratio>` file name suffix.
fn ratio_from_name(path: &Path) -> Option<f64> {
    let name = path.file_name()?.to_str()?;
    let (_, tail) = name.rsplit_once(".xi")?;
    tail.parse().ok()
}

fn cmd_evolve(a: EvolveArgs) -> Outcome {
    let mut s = a.common.settings()?;
    if a.no_recombination {
        s.recombination = false;
    }
    if let Some(n) = a.stagnation {
        s.stagnation = n;
    }
    if a.max_steps.is_some() {
        s.max_steps = a.max_steps;
    }
    s.validate()?;
    let seed = a.common.seed();
    let targets = a
        .targets
        .iter()
        .map(|p| read_network(p, None))
        .collect::<Outcome<Vec<_>>>()?;
    let ratios = if !a.ratios.is_empty() {
        a.ratios.clone()
    } else if targets.len() == 1 {
        vec![1.0]
    } else {
        a.targets
            .iter()
            .map(|p| {
                ratio_from_name(p).ok_or_else(|| {
                    Failure::User(format!("{}: no .xi<ratio> suffix; pass --ratios", p.display()))
                })
            })
            .collect::<Outcome<Vec<_>>>()?
    };
    if ratios.len() != targets.len() {
        return user(format!("{} targets but {} ratios", targets.len(), ratios.len()));
    }
    let directed = targets[0].is_directed();
    let cfg = s.search_config(directed, seed);
    let prepared = netregress::evolve::prepare_targets(&targets, &cfg.metrics, seed)?;

    let mut sink: Box<dyn Write> = match &a.log {
        Some(path) => Box::new(create(path)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    writeln!(sink, "# seed={seed}").map_err(io_failure)?;
    writeln!(sink, "{}", RunLog::csv_header(ratios.len())).map_err(io_failure)?;
    let mut write_error = None;
    let mut on_step = |r: &StepRecord| {
        if write_error.is_none() {
            if let Err(e) = writeln!(sink, "{}", RunLog::csv_row(r)) {
                write_error = Some(e);
            }
        }
    };
    let log = match &a.initial {
        Some(path) => {
            if prepared.len() != 1 {
                return user("--initial takes exactly one target");
            }
            let initial = read_network(path, Some(directed))?;
            evolve_from_initial_prepared(&initial, &prepared[0], &cfg, &mut on_step)?
        }
        None => evolve_prepared(&prepared, &ratios, &cfg, &mut on_step)?,
    };
    if let Some(e) = write_error {
        return Err(io_failure(e));
    }
    sink.flush().map_err(io_failure)?;
    drop(sink);

    let summary = json!({
        "seed": seed,
        "steps": log.steps(),
        "best_step": log.last_improvement,
        "best": log.best.tree.to_string(),
        "simplified": log.best_simplified.to_string(),
        "family": classify(&log.best_simplified).to_string(),
        "shortest": log.shortest.tree.to_string(),
        "fitness": log.best.fitness(),
        "mean_dissimilarity": log.best.mean_dissimilarity(),
        "snapshot_ratios": log.snapshot_ratios,
    });
    match &a.out {
        Some(prefix) => {
            let with = |ext: &str| {
                let mut s = prefix.as_os_str().to_owned();
                s.push(ext);
                PathBuf::from(s)
            };
            let put = |path: PathBuf, text: String| {
                fs::write(&path, text).or_else(|e| user(format!("cannot write {}: {e}", path.display())))
            };
            put(with(".best"), format!("{}\n", log.best.tree))?;
            put(with(".simplified"), format!("{}\n", log.best_simplified))?;
            let text = serde_json::to_string_pretty(&summary).map_err(|e| Failure::Internal(e.to_string()))?;
            put(with(".json"), text + "\n")
        }
        None => {
            if a.log.is_some() {
                print_json(&summary)
            } else {
                // stdout carries the CSV; keep it parseable
                eprintln!("{summary}");
                Ok(())
            }
        }
    }
}

fn cmd_experiment(a: ExperimentArgs) -> Outcome {
    let spec = ExperimentSpec::parse(&read_text(&a.spec)?)?;
    let run = || run_experiment(&spec);
    let results = match a.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Internal(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    match &a.out {
        Some(path) => {
            let mut w = create(path)?;
            results.write_csv(&mut w)?;
            w.flush().map_err(io_failure)?;
        }
        None => results.write_csv(io::stdout().lock())?,
    }
    if let Some(path) = &a.json {
        let text = serde_json::to_string_pretty(&results.to_json()).map_err(|e| Failure::Internal(e.to_string()))?;
        fs::write(path, text + "\n").or_else(|e| user(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_census(a: CensusArgs) -> Outcome {
    let net = read_network(&a.network, Some(a.directed))?;
    let degrees: Vec<usize> = (0..net.node_count() as u32)
        .map(|v| net.degree(v, DegreeKind::Total))
        .collect::<Result<_, _>>()?;
    print_json(&json!({
        "nodes": net.node_count(),
        "edges": net.edge_count(),
        "directed": net.is_directed(),
        "max_degree": degrees.iter().copied().max().unwrap_or(0),
        "census": census_json(&net)?,
    }))
}

fn cmd_distcheck(a: DistcheckArgs) -> Outcome {
    let s = a.common.settings()?;
    let seed = a.common.seed();
    let mut config: std::collections::BTreeMap<String, String> = s
        .to_document()
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    config.insert("distance_mode".into(), "heuristic".into());
    let spec = ExperimentSpec {
        experiments: vec![Experiment::RwBenchmark(RwBenchmark {
            nodes: a.nodes,
            edges: a.edges,
            generator: a.generator,
            steps: a.steps,
            runs: a.runs,
            checkpoints: a.checkpoints,
            seed,
            config,
        })],
    };
    let results = run_experiment(&spec)?;
    let mut out = io::stdout().lock();
    writeln!(out, "# seed={seed}").map_err(io_failure)?;
    results.write_csv(&mut out)?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Census(a) => cmd_census(a),
        Command::Distcheck(a) => cmd_distcheck(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
