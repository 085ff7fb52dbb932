//! The evolutionary search loop.
//!
//! A small pool of incumbent generators is kept: the best-fitness tree, the
//! shortest tree within a tolerance of it and, when recombination is on,
//! the trees with the lowest mean dissimilarity and the lowest distance
//! ratio. Each step clones a pool member, mutates or recombines it, grows a
//! single network and offers the result to every slot.

use std::fmt;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dsl::{mutate, random_tree, recombine, GeneratorTree, InitParams};
use crate::graph::Network;
use crate::metrics::{FitnessReport, MetricKind, MetricSettings, TargetEvaluator};
use crate::netgen::{generate, generate_from, GenerationConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Anti-bloat tolerance `b_r` for single-snapshot searches.
    pub anti_bloat: f64,
    /// Per-snapshot tolerance once more than one snapshot is fitted.
    pub snapshot_tolerance: f64,
    /// Stop after this many consecutive steps without any slot update.
    pub stagnation: usize,
    /// Optional hard cap on the number of steps.
    pub max_steps: Option<usize>,
    pub recombination: bool,
    pub recombination_probability: f64,
    /// Adds one best-at-snapshot slot per snapshot (recombination mode only).
    pub per_snapshot_slots: bool,
    /// Node and edge counts, snapshot ratios and the seed are taken from the
    /// targets and from [`SearchConfig::seed`]; the rest is used as given.
    pub generation: GenerationConfig,
    pub init: InitParams,
    pub metrics: MetricSettings,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            anti_bloat: 0.10,
            snapshot_tolerance: 0.05,
            stagnation: 1000,
            max_steps: None,
            recombination: true,
            recombination_probability: 0.5,
            per_snapshot_slots: false,
            generation: GenerationConfig::new(2, 1, false),
            init: InitParams::default(),
            metrics: MetricSettings::default(),
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.anti_bloat >= 0.0) || !(self.snapshot_tolerance >= 0.0) {
            return Err(Error::input("anti-bloat tolerances must be non-negative"));
        }
        if self.stagnation == 0 {
            return Err(Error::input("stagnation window must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.recombination_probability) {
            return Err(Error::input("recombination probability must lie in [0, 1]"));
        }
        self.init.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposal {
    Init,
    Mutate,
    Recombine,
}

impl fmt::Display for Proposal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Proposal::Init => "init",
            Proposal::Mutate => "mutate",
            Proposal::Recombine => "recombine",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    /// Best fitness.
    Best,
    /// Shortest within tolerance of the best.
    Shortest,
    /// Lowest mean dissimilarity.
    MeanDissimilarity,
    /// Lowest undirected distance ratio.
    UndirectedDistance,
    /// Best fitness at one snapshot.
    Snapshot(usize),
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Best => f.write_str("b"),
            Slot::Shortest => f.write_str("s"),
            Slot::MeanDissimilarity => f.write_str("md"),
            Slot::UndirectedDistance => f.write_str("ud"),
            Slot::Snapshot(i) => write!(f, "s{}", i + 1),
        }
    }
}

/// A tree with its per-snapshot fitness reports.
#[derive(Debug, Clone)]
pub struct Solution {
    pub tree: GeneratorTree,
    pub reports: Vec<FitnessReport>,
}

impl Solution {
    pub fn size(&self) -> usize {
        self.tree.size()
    }

    pub fn fitness(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.fitness).collect()
    }

    /// Worst fitness over snapshots.
    pub fn max_fitness(&self) -> f64 {
        self.reports.iter().map(|r| r.fitness).fold(0.0, f64::max)
    }

    pub fn mean_dissimilarity(&self) -> f64 {
        mean(self.reports.iter().map(|r| r.mean_dissimilarity))
    }

    pub fn distance_ratio(&self) -> f64 {
        mean(
            self.reports
                .iter()
                .map(|r| r.ratio(MetricKind::UndirectedDistance).unwrap_or(f64::INFINITY)),
        )
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub proposal: Proposal,
    pub accepted: Vec<Slot>,
    /// Candidate fitness at each snapshot.
    pub fitness: Vec<f64>,
    pub mean_dissimilarity: f64,
    pub tree_size: usize,
}

#[derive(Debug, Clone)]
pub struct RunLog {
    pub records: Vec<StepRecord>,
    /// The best-fitness solution.
    pub best: Solution,
    pub best_simplified: GeneratorTree,
    /// The shortest solution within tolerance of the best.
    pub shortest: Solution,
    /// Step at which the best solution was last replaced.
    pub last_improvement: usize,
    pub initial_edge_count: usize,
    pub snapshot_ratios: Vec<f64>,
    pub seed: u64,
}

impl RunLog {
    pub fn steps(&self) -> usize {
        self.records.last().map_or(0, |r| r.step)
    }

    pub fn csv_header(snapshots: usize) -> String {
        let mut h = String::from("step,proposal,accepted_slots");
        for s in 1..=snapshots {
            h.push_str(&format!(",fitness_s{s}"));
        }
        h.push_str(",mean_dissim,tree_size");
        h
    }

    pub fn csv_row(r: &StepRecord) -> String {
        let slots = if r.accepted.is_empty() {
            "-".to_string()
        } else {
            r.accepted.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("|")
        };
        let mut row = format!("{},{},{}", r.step, r.proposal, slots);
        for f in &r.fitness {
            row.push_str(&format!(",{f}"));
        }
        row.push_str(&format!(",{},{}", r.mean_dissimilarity, r.tree_size));
        row
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::csv_header(self.snapshot_ratios.len()))?;
        for r in &self.records {
            writeln!(out, "{}", Self::csv_row(r))?;
        }
        Ok(())
    }
}

/// How candidate trees are turned into networks.
enum Growth<'a> {
    Fresh,
    From(&'a Network),
}

struct Search<'a> {
    targets: &'a [TargetEvaluator],
    growth: Growth<'a>,
    gen: GenerationConfig,
    cfg: &'a SearchConfig,
}

impl Search<'_> {
    fn evaluate(&self, tree: GeneratorTree, seed: u64) -> Result<Solution> {
        let mut gen = self.gen.clone();
        gen.seed = seed;
        let result = match self.growth {
            Growth::Fresh => generate(&tree, &gen)?,
            Growth::From(initial) => generate_from(initial, &tree, &gen)?,
        };
        let reports = result
            .stages()
            .into_iter()
            .zip(self.targets)
            .map(|(net, target)| target.score(net))
            .collect::<Result<Vec<_>>>()?;
        Ok(Solution { tree, reports })
    }

    fn tolerance(&self) -> f64 {
        if self.targets.len() > 1 {
            self.cfg.snapshot_tolerance
        } else {
            self.cfg.anti_bloat
        }
    }

    fn within(&self, s: &Solution, best: &Solution) -> bool {
        let tol = 1.0 + self.tolerance();
        s.reports
            .iter()
            .zip(&best.reports)
            .all(|(a, b)| a.fitness <= tol * b.fitness)
    }

    fn run(&self, on_step: &mut dyn FnMut(&StepRecord)) -> Result<RunLog> {
        let cfg = self.cfg;
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

        let first = random_tree(&cfg.init, &mut rng);
        let first = self.evaluate(first, rng.gen())?;
        let mut slots = vec![Slot::Best, Slot::Shortest];
        if cfg.recombination {
            slots.extend([Slot::MeanDissimilarity, Slot::UndirectedDistance]);
            if cfg.per_snapshot_slots && self.targets.len() > 1 {
                slots.extend((0..self.targets.len()).map(Slot::Snapshot));
            }
        }
        let mut pool: Vec<Solution> = vec![first.clone(); slots.len()];

        let record = |step, proposal, accepted, s: &Solution| StepRecord {
            step,
            proposal,
            accepted,
            fitness: s.fitness(),
            mean_dissimilarity: s.mean_dissimilarity(),
            tree_size: s.size(),
        };
        let init = record(0, Proposal::Init, slots.clone(), &first);
        on_step(&init);
        let mut records = vec![init];
        let mut last_update = 0;
        let mut last_improvement = 0;
        let mut step = 0;

        loop {
            if step - last_update >= cfg.stagnation || cfg.max_steps.is_some_and(|m| step >= m) {
                break;
            }
            step += 1;
            let pick = rng.gen_range(0..pool.len());
            let recombining = cfg.recombination && pool.len() > 1 && rng.gen_bool(cfg.recombination_probability);
            let (tree, proposal) = if recombining {
                let mut other = rng.gen_range(0..pool.len() - 1);
                if other >= pick {
                    other += 1;
                }
                (recombine(&pool[pick].tree, &pool[other].tree, &mut rng), Proposal::Recombine)
            } else {
                (mutate(&pool[pick].tree, &cfg.init, &mut rng), Proposal::Mutate)
            };
            let cand = self.evaluate(tree, rng.gen())?;

            let mut accepted = Vec::new();
            for (i, slot) in slots.iter().enumerate() {
                let cur = &pool[i];
                let better = match slot {
                    Slot::Best => cand
                        .reports
                        .iter()
                        .zip(&cur.reports)
                        .all(|(a, b)| a.fitness < b.fitness),
                    Slot::Shortest => false,
                    Slot::MeanDissimilarity => cand.mean_dissimilarity() < cur.mean_dissimilarity(),
                    Slot::UndirectedDistance => cand.distance_ratio() < cur.distance_ratio(),
                    Slot::Snapshot(s) => cand.reports[*s].fitness < cur.reports[*s].fitness,
                };
                if better {
                    pool[i] = cand.clone();
                    accepted.push(*slot);
                }
            }
            // slots[0] is Best and slots[1] is Shortest
            if accepted.contains(&Slot::Best) {
                last_improvement = step;
                if pool[1].size() > pool[0].size() || !self.within(&pool[1], &pool[0]) {
                    pool[1] = pool[0].clone();
                    accepted.push(Slot::Shortest);
                }
            }
            if cand.size() < pool[1].size() && self.within(&cand, &pool[0]) {
                pool[1] = cand.clone();
                if !accepted.contains(&Slot::Shortest) {
                    accepted.push(Slot::Shortest);
                }
            }
            if !accepted.is_empty() {
                last_update = step;
            }
            let r = record(step, proposal, accepted, &cand);
            on_step(&r);
            records.push(r);
        }

        let best = pool[0].clone();
        Ok(RunLog {
            records,
            best_simplified: best.tree.simplify(),
            best,
            shortest: pool[1].clone(),
            last_improvement,
            initial_edge_count: match self.growth {
                Growth::Fresh => 0,
                Growth::From(n) => n.edge_count(),
            },
            snapshot_ratios: self.gen.snapshot_ratios.clone(),
            seed: cfg.seed,
        })
    }
}

/// Targets prepared once for repeated searches: profiles and null baselines.
pub fn prepare_targets(targets: &[Network], settings: &MetricSettings, seed: u64) -> Result<Vec<TargetEvaluator>> {
    targets
        .iter()
        .enumerate()
        .map(|(i, t)| TargetEvaluator::new(t.clone(), *settings, seed.wrapping_add(i as u64)))
        .collect()
}

fn generation_for(targets: &[TargetEvaluator], ratios: &[f64], cfg: &SearchConfig) -> Result<GenerationConfig> {
    let Some(last) = targets.last() else {
        return Err(Error::input("at least one target network is required"));
    };
    if targets.len() != ratios.len() {
        return Err(Error::input(format!(
            "{} targets but {} snapshot ratios",
            targets.len(),
            ratios.len()
        )));
    }
    let net = &last.network;
    for t in targets {
        if t.network.node_count() != net.node_count() || t.network.is_directed() != net.is_directed() {
            return Err(Error::input("targets differ in node count or directedness"));
        }
    }
    let mut gen = cfg.generation.clone();
    gen.node_count = net.node_count();
    gen.directed = net.is_directed();
    gen.target_edge_count = net.edge_count();
    gen.snapshot_ratios = ratios.to_vec();
    gen.validate()?;
    for (t, &xi) in targets.iter().zip(ratios) {
        let want = gen.snapshot_edge_count(xi);
        if t.network.edge_count() != want {
            return Err(Error::input(format!(
                "target at xi={xi} has {} edges, expected {want}",
                t.network.edge_count()
            )));
        }
    }
    Ok(gen)
}

/// Searches for a generator reproducing `targets`, one per ratio in
/// `ratios` (strictly increasing, ending at 1.0).
pub fn evolve(targets: &[Network], ratios: &[f64], cfg: &SearchConfig) -> Result<RunLog> {
    let prepared = prepare_targets(targets, &cfg.metrics, cfg.seed)?;
    evolve_prepared(&prepared, ratios, cfg, &mut |_| {})
}

/// [`evolve`] with prepared targets and a per-step callback.
pub fn evolve_prepared(
    targets: &[TargetEvaluator],
    ratios: &[f64],
    cfg: &SearchConfig,
    on_step: &mut dyn FnMut(&StepRecord),
) -> Result<RunLog> {
    let gen = generation_for(targets, ratios, cfg)?;
    Search {
        targets,
        growth: Growth::Fresh,
        gen,
        cfg,
    }
    .run(on_step)
}

/// Searches for a generator that grows `initial` into `target`.
pub fn evolve_from_initial(initial: &Network, target: &Network, cfg: &SearchConfig) -> Result<RunLog> {
    let prepared = prepare_targets(std::slice::from_ref(target), &cfg.metrics, cfg.seed)?;
    evolve_from_initial_prepared(initial, &prepared[0], cfg, &mut |_| {})
}

pub fn evolve_from_initial_prepared(
    initial: &Network,
    target: &TargetEvaluator,
    cfg: &SearchConfig,
    on_step: &mut dyn FnMut(&StepRecord),
) -> Result<RunLog> {
    let targets = std::slice::from_ref(target);
    let gen = generation_for(targets, &[1.0], cfg)?;
    if initial.node_count() != gen.node_count || initial.is_directed() != gen.directed {
        return Err(Error::input("initial network does not match the target's size or directedness"));
    }
    if initial.edge_count() >= gen.target_edge_count {
        return Err(Error::input(format!(
            "initial network has {} edges, the target only {}",
            initial.edge_count(),
            gen.target_edge_count
        )));
    }
    Search {
        targets,
        growth: Growth::From(initial),
        gen,
        cfg,
    }
    .run(on_step)
}
