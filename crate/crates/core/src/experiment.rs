//! Batch experiments described by a JSON document.
//!
//! ```json
//! {"experiments": [
//!   {"kind": "delta_distinctiveness", "nodes": 300, "edges": 3000},
//!   {"kind": "rw_benchmark", "nodes": 200, "edges": 2000, "steps": [1, 5]},
//!   {"kind": "recovery", "name": "er", "generator": "1", "nodes": 200, "edges": 1000,
//!    "expect": {"variable_free": true, "max_fitness": 0.3}}
//! ]}
//! ```
//!
//! Results come back as long-format rows (`experiment, group, xi, quantity,
//! value, runs`) plus per-run summaries for searches.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Settings;
use crate::dsl::{classify, contains_delta, delta_thresholds, Family, GeneratorTree};
use crate::evolve::{evolve_from_initial_prepared, evolve_prepared, prepare_targets, RunLog};
use crate::graph::{DistanceMode, Network};
use crate::metrics::TargetEvaluator;
use crate::netgen::{generate, generate_observed, GenerationConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub experiments: Vec<Experiment>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    DeltaDistinctiveness(DeltaDistinctiveness),
    RwBenchmark(RwBenchmark),
    Recovery(Recovery),
}

fn default_delta() -> String {
    "(delta 0.5 k (pow k k))".into()
}

fn default_comparisons() -> BTreeMap<String, String> {
    [
        ("delta", "(delta 0.5 k (pow k k))"),
        ("shorthand", "(> xi 0.5 (pow k k) k)"),
        ("pa", "k"),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect()
}

fn default_ratios() -> Vec<f64> {
    vec![0.5, 1.0]
}

fn five() -> usize {
    5
}

fn ten() -> usize {
    10
}

/// Targets from one generator compared against networks from several others.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaDistinctiveness {
    pub nodes: usize,
    pub edges: usize,
    #[serde(default = "default_delta")]
    pub target: String,
    /// Group name to generator.
    #[serde(default = "default_comparisons")]
    pub comparisons: BTreeMap<String, String>,
    #[serde(default = "five")]
    pub targets: usize,
    /// Networks per comparison group and target.
    #[serde(default = "ten")]
    pub runs: usize,
    #[serde(default = "default_ratios")]
    pub ratios: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub config: BTreeMap<String, String>,
}

fn default_steps() -> Vec<usize> {
    vec![1, 5]
}

fn default_distance() -> String {
    "d".into()
}

/// Random-walk distance accuracy during growth.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RwBenchmark {
    pub nodes: usize,
    pub edges: usize,
    #[serde(default = "default_distance")]
    pub generator: String,
    #[serde(default = "default_steps")]
    pub steps: Vec<usize>,
    #[serde(default = "five")]
    pub runs: usize,
    /// Number of evenly spaced checkpoints in edge ratio.
    #[serde(default = "ten")]
    pub checkpoints: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub config: BTreeMap<String, String>,
}

/// What counts as recovering the generator.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    /// One of `constant`, `degree`, `pa`, `pa_prime`, `distance`,
    /// `inverse_distance`, `identifier`.
    #[serde(default)]
    pub family: Option<String>,
    #[serde(default)]
    pub variable_free: bool,
    #[serde(default)]
    pub delta_free: bool,
    /// Required switch threshold range `[lo, hi]` of some delta node.
    #[serde(default)]
    pub delta: Option<[f64; 2]>,
    /// Upper bound on the best fitness at every snapshot.
    #[serde(default)]
    pub max_fitness: Option<f64>,
}

/// Repeated searches against targets grown from a known generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recovery {
    pub name: String,
    pub generator: String,
    pub nodes: usize,
    pub edges: usize,
    #[serde(default)]
    pub directed: bool,
    #[serde(default = "five")]
    pub runs: usize,
    /// Target snapshot ratios; the last must be 1.0.
    #[serde(default = "one_snapshot")]
    pub snapshots: Vec<f64>,
    /// Grow a fresh target for every run instead of sharing one.
    #[serde(default)]
    pub distinct_targets: bool,
    /// Start searches from this fraction of the target's edges.
    #[serde(default)]
    pub initial_fraction: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Config-file keys overriding the defaults for this experiment.
    #[serde(default)]
    pub config: BTreeMap<String, String>,
    #[serde(default)]
    pub expect: Expectation,
}

fn one_snapshot() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub group: String,
    pub xi: Option<f64>,
    pub quantity: String,
    pub value: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub experiment: String,
    pub run: usize,
    pub seed: u64,
    pub steps: usize,
    pub best_step: usize,
    pub fitness: Vec<f64>,
    pub mean_dissimilarity: f64,
    pub best: String,
    pub simplified: String,
    pub family: String,
    pub delta_thresholds: Vec<f64>,
    pub recovered: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResults {
    pub rows: Vec<ResultRow>,
    pub runs: Vec<RunSummary>,
}

impl ExperimentResults {
    pub fn value(&self, experiment: &str, group: &str, xi: Option<f64>, quantity: &str) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.experiment == experiment && r.group == group && r.xi == xi && r.quantity == quantity)
            .map(|r| r.value)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "experiment,group,xi,quantity,value,runs")?;
        for r in &self.rows {
            let xi = r.xi.map_or(String::new(), |x| x.to_string());
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.experiment, r.group, xi, r.quantity, r.value, r.runs
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("results serialise")
    }
}

impl ExperimentSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::input(format!("experiment spec: {e}")))
    }
}

fn settings(overrides: &BTreeMap<String, String>) -> Result<Settings> {
    let mut s = Settings::default();
    let mut unknown = Vec::new();
    for (k, v) in overrides {
        if crate::config::KEYS.contains(&k.as_str()) {
            s.set(k, v)?;
        } else {
            unknown.push(k.as_str());
        }
    }
    if !unknown.is_empty() {
        return Err(Error::input(format!("unknown config keys: {}", unknown.join(", "))));
    }
    s.validate()?;
    Ok(s)
}

fn parse_tree(text: &str) -> Result<GeneratorTree> {
    GeneratorTree::parse(text)
}

/// Independent 64-bit seed for item `k` of stream `seed`.
pub(crate) fn derive_seed(seed: u64, stream: u64, k: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    z = z.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn delta_distinctiveness(spec: &DeltaDistinctiveness) -> Result<ExperimentResults> {
    let s = settings(&spec.config)?;
    let target_tree = parse_tree(&spec.target)?;
    let groups: Vec<(String, GeneratorTree)> = spec
        .comparisons
        .iter()
        .map(|(k, v)| Ok((k.clone(), parse_tree(v)?)))
        .collect::<Result<_>>()?;
    let gen = |seed| {
        s.generation_config(spec.nodes, spec.edges, false, seed)
            .with_snapshots(&spec.ratios)
    };
    gen(0).validate()?;
    let metrics = s.metric_settings();

    // (group, snapshot) -> per-network fitness and mean dissimilarity
    let per_target: Vec<Vec<(usize, usize, f64, f64)>> = (0..spec.targets as u64)
        .into_par_iter()
        .map(|t| {
            let target = generate(&target_tree, &gen(derive_seed(spec.seed, 1, t)))?;
            let evals = target
                .snapshots
                .iter()
                .enumerate()
                .map(|(i, snap)| TargetEvaluator::new(snap.network.clone(), metrics, derive_seed(spec.seed, 2, t * 16 + i as u64)))
                .collect::<Result<Vec<_>>>()?;
            let mut out = Vec::new();
            for (g, (_, tree)) in groups.iter().enumerate() {
                for r in 0..spec.runs as u64 {
                    let seed = derive_seed(spec.seed, 3 + g as u64, t * 1_000_003 + r);
                    let net = generate(tree, &gen(seed))?;
                    for (i, snap) in net.snapshots.iter().enumerate() {
                        let rep = evals[i].score(&snap.network)?;
                        out.push((g, i, rep.fitness, rep.mean_dissimilarity));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (g, (name, _)) in groups.iter().enumerate() {
        for (i, &xi) in spec.ratios.iter().enumerate() {
            let pick = |f: fn(&(usize, usize, f64, f64)) -> f64| -> Vec<f64> {
                per_target
                    .iter()
                    .flatten()
                    .filter(|x| x.0 == g && x.1 == i)
                    .map(f)
                    .collect()
            };
            let fit = pick(|x| x.2);
            let md = pick(|x| x.3);
            for (quantity, xs) in [("mean_fitness", &fit), ("mean_dissimilarity", &md)] {
                rows.push(ResultRow {
                    experiment: "delta_distinctiveness".into(),
                    group: name.clone(),
                    xi: Some(xi),
                    quantity: quantity.into(),
                    value: mean(xs),
                    runs: xs.len(),
                });
            }
        }
    }
    Ok(ExperimentResults { rows, runs: Vec::new() })
}

fn rw_benchmark(spec: &RwBenchmark) -> Result<ExperimentResults> {
    let s = settings(&spec.config)?;
    let tree = parse_tree(&spec.generator)?;
    if !tree.variables().needs_undirected_distance() {
        return Err(Error::input("rw_benchmark needs a generator that reads d"));
    }
    if spec.checkpoints == 0 {
        return Err(Error::input("rw_benchmark needs at least one checkpoint"));
    }
    let checkpoints: Vec<usize> = (1..=spec.checkpoints)
        .map(|c| (c as f64 / spec.checkpoints as f64 * spec.edges as f64).round() as usize)
        .collect();
    let sentinel = s.infinite_distance;
    let mut rows = Vec::new();
    for &steps in &spec.steps {
        let per_run: Vec<Vec<f64>> = (0..spec.runs as u64)
            .into_par_iter()
            .map(|r| {
                let mut cfg = s.generation_config(spec.nodes, spec.edges, false, derive_seed(spec.seed, 10, r));
                cfg.distance_mode = DistanceMode::Heuristic;
                cfg.rw_steps_per_edge = steps;
                let mut fractions = Vec::new();
                let mut observe = |net: &Network, oracle: &crate::graph::DistanceOracle| {
                    if checkpoints.contains(&net.edge_count()) {
                        if let Some(m) = oracle.undirected_matrix() {
                            fractions.push(m.correct_fraction(net, sentinel));
                        }
                    }
                };
                generate_observed(&[], &tree, &cfg, &mut observe)?;
                Ok(fractions)
            })
            .collect::<Result<_>>()?;
        for (c, &count) in checkpoints.iter().enumerate() {
            let xs: Vec<f64> = per_run.iter().filter_map(|f| f.get(c).copied()).collect();
            rows.push(ResultRow {
                experiment: "rw_benchmark".into(),
                group: format!("steps={steps}"),
                xi: Some(count as f64 / spec.edges as f64),
                quantity: "correct_fraction".into(),
                value: mean(&xs),
                runs: xs.len(),
            });
        }
    }

    // networks grown with exact distances against heuristic-grown ones
    let steps = s.rw_steps;
    let md: Vec<f64> = (0..spec.runs as u64)
        .into_par_iter()
        .map(|r| {
            let base = s.generation_config(spec.nodes, spec.edges, false, 0);
            let exact = generate(
                &tree,
                &GenerationConfig {
                    distance_mode: DistanceMode::Exact,
                    seed: derive_seed(spec.seed, 11, r),
                    ..base.clone()
                },
            )?;
            let heuristic = generate(
                &tree,
                &GenerationConfig {
                    distance_mode: DistanceMode::Heuristic,
                    rw_steps_per_edge: steps,
                    seed: derive_seed(spec.seed, 12, r),
                    ..base
                },
            )?;
            let eval = TargetEvaluator::new(exact.network, s.metric_settings(), derive_seed(spec.seed, 13, r))?;
            Ok(eval.score(&heuristic.network)?.mean_dissimilarity)
        })
        .collect::<Result<_>>()?;
    rows.push(ResultRow {
        experiment: "rw_benchmark".into(),
        group: "exact_vs_heuristic".into(),
        xi: Some(1.0),
        quantity: "mean_dissimilarity".into(),
        value: mean(&md),
        runs: md.len(),
    });
    Ok(ExperimentResults { rows, runs: Vec::new() })
}

fn family_matches(want: &str, got: &Family) -> Result<bool> {
    Ok(match want {
        "constant" => *got == Family::Constant,
        "degree" => got.is_degree(),
        "pa" => *got == Family::Degree,
        "pa_prime" => *got == Family::DegreeSuperPoly,
        "distance" => *got == Family::Distance,
        "inverse_distance" => *got == Family::InverseDistance,
        "identifier" => *got == Family::Identifier,
        other => return Err(Error::input(format!("unknown family {other:?}"))),
    })
}

impl Expectation {
    fn validate(&self) -> Result<()> {
        if let Some(f) = &self.family {
            family_matches(f, &Family::Other)?;
        }
        Ok(())
    }

    /// Whether a finished run recovered the expected generator.
    pub fn met_by(&self, log: &RunLog) -> bool {
        let simplified = &log.best_simplified;
        let family = classify(simplified);
        let fitness_ok = self
            .max_fitness
            .is_none_or(|m| log.best.reports.iter().all(|r| r.fitness <= m));
        let family_ok = self
            .family
            .as_deref()
            .is_none_or(|f| family_matches(f, &family).unwrap_or(false));
        let delta_ok = self.delta.is_none_or(|[lo, hi]| {
            delta_thresholds(simplified)
                .iter()
                .any(|&t| (lo..=hi).contains(&t))
        });
        fitness_ok
            && family_ok
            && delta_ok
            && (!self.variable_free || simplified.is_variable_free())
            && (!self.delta_free || !contains_delta(simplified))
    }
}

fn recovery(spec: &Recovery) -> Result<ExperimentResults> {
    let s = settings(&spec.config)?;
    spec.expect.validate()?;
    let tree = parse_tree(&spec.generator)?;
    let build_targets = |seed: u64| -> Result<(Vec<Network>, Option<Network>)> {
        let cfg = s
            .generation_config(spec.nodes, spec.edges, spec.directed, seed)
            .with_snapshots(&spec.snapshots);
        let res = generate(&tree, &cfg)?;
        let initial = match spec.initial_fraction {
            Some(f) if !(0.0..1.0).contains(&f) => {
                return Err(Error::input("initial_fraction must lie in [0, 1)"));
            }
            Some(f) => Some(res.network.prefix((f * spec.edges as f64).round() as usize)?),
            None => None,
        };
        let nets = if spec.initial_fraction.is_some() {
            vec![res.network]
        } else {
            res.snapshots.into_iter().map(|s| s.network).collect()
        };
        Ok((nets, initial))
    };
    let ratios = if spec.initial_fraction.is_some() {
        vec![1.0]
    } else {
        spec.snapshots.clone()
    };
    let metrics = s.metric_settings();
    let prepare = |t: u64| -> Result<(Vec<TargetEvaluator>, Option<Network>)> {
        let (nets, initial) = build_targets(derive_seed(spec.seed, 20, t))?;
        Ok((prepare_targets(&nets, &metrics, derive_seed(spec.seed, 21, t))?, initial))
    };
    let shared = if spec.distinct_targets { None } else { Some(prepare(0)?) };

    let logs: Vec<(u64, RunLog)> = (0..spec.runs as u64)
        .into_par_iter()
        .map(|r| {
            let own;
            let (targets, initial) = match &shared {
                Some(x) => x,
                None => {
                    own = prepare(r)?;
                    &own
                }
            };
            let seed = derive_seed(spec.seed, 22, r);
            let cfg = s.search_config(spec.directed, seed);
            let log = match initial {
                Some(init) => evolve_from_initial_prepared(init, &targets[0], &cfg, &mut |_| {})?,
                None => evolve_prepared(targets, &ratios, &cfg, &mut |_| {})?,
            };
            Ok((seed, log))
        })
        .collect::<Result<_>>()?;

    let runs: Vec<RunSummary> = logs
        .iter()
        .enumerate()
        .map(|(i, (seed, log))| RunSummary {
            experiment: spec.name.clone(),
            run: i,
            seed: *seed,
            steps: log.steps(),
            best_step: log.last_improvement,
            fitness: log.best.fitness(),
            mean_dissimilarity: log.best.mean_dissimilarity(),
            best: log.best.tree.to_string(),
            simplified: log.best_simplified.to_string(),
            family: classify(&log.best_simplified).to_string(),
            delta_thresholds: delta_thresholds(&log.best_simplified),
            recovered: spec.expect.met_by(log),
        })
        .collect();

    let n = runs.len();
    let mut rows = Vec::new();
    let mut row = |quantity: &str, xi: Option<f64>, value: f64| {
        rows.push(ResultRow {
            experiment: "recovery".into(),
            group: spec.name.clone(),
            xi,
            quantity: quantity.into(),
            value,
            runs: n,
        })
    };
    for (i, &xi) in ratios.iter().enumerate() {
        let f: Vec<f64> = runs.iter().map(|r| r.fitness[i]).collect();
        row("mean_fitness", Some(xi), mean(&f));
    }
    let col = |f: fn(&RunSummary) -> f64| runs.iter().map(f).collect::<Vec<_>>();
    row("mean_dissimilarity", None, mean(&col(|r| r.mean_dissimilarity)));
    row("mean_best_step", None, mean(&col(|r| r.best_step as f64)));
    row("mean_steps", None, mean(&col(|r| r.steps as f64)));
    row("recovered", None, runs.iter().filter(|r| r.recovered).count() as f64);
    Ok(ExperimentResults { rows, runs })
}

/// Runs every experiment in `spec`, in order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResults> {
    let mut all = ExperimentResults::default();
    for e in &spec.experiments {
        let r = match e {
            Experiment::DeltaDistinctiveness(x) => delta_distinctiveness(x)?,
            Experiment::RwBenchmark(x) => rw_benchmark(x)?,
            Experiment::Recovery(x) => recovery(x)?,
        };
        all.rows.extend(r.rows);
        all.runs.extend(r.runs);
    }
    Ok(all)
}
