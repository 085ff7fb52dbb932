//! Structural metrics, dissimilarities and the ER-normalised fitness.
//!
//! Degree and PageRank distributions are compared with a histogram earth
//! mover's distance; distance and triad counts with a ratio dissimilarity.
//! Each raw value is divided by the mean dissimilarity between the target
//! and 30 random networks of the same size, so 0 means identical and 1 means
//! no better than chance. Fitness is the worst of these ratios.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::graph::{
    bfs_distances, pagerank, triad_census, DistanceKind, Network, NodeId, PageRankDirection, PageRankParams,
    DEFAULT_SENTINEL, UNREACHABLE,
};
use crate::netgen::erdos_renyi;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Degree,
    InDegree,
    OutDegree,
    #[serde(rename = "pagerank")]
    PageRank,
    #[serde(rename = "pagerank_direct")]
    PageRankDirect,
    #[serde(rename = "pagerank_reverse")]
    PageRankReverse,
    UndirectedDistance,
    DirectedDistance,
    TriadCensus,
}

const UNDIRECTED_METRICS: [MetricKind; 4] = [
    MetricKind::Degree,
    MetricKind::PageRank,
    MetricKind::UndirectedDistance,
    MetricKind::TriadCensus,
];

const DIRECTED_METRICS: [MetricKind; 7] = [
    MetricKind::InDegree,
    MetricKind::OutDegree,
    MetricKind::PageRankDirect,
    MetricKind::PageRankReverse,
    MetricKind::UndirectedDistance,
    MetricKind::DirectedDistance,
    MetricKind::TriadCensus,
];

impl MetricKind {
    pub fn key(self) -> &'static str {
        match self {
            MetricKind::Degree => "degree",
            MetricKind::InDegree => "in_degree",
            MetricKind::OutDegree => "out_degree",
            MetricKind::PageRank => "pagerank",
            MetricKind::PageRankDirect => "pagerank_direct",
            MetricKind::PageRankReverse => "pagerank_reverse",
            MetricKind::UndirectedDistance => "undirected_distance",
            MetricKind::DirectedDistance => "directed_distance",
            MetricKind::TriadCensus => "triad_census",
        }
    }

    /// Metrics measured on networks of the given directedness.
    pub fn for_network(directed: bool) -> &'static [MetricKind] {
        if directed {
            &DIRECTED_METRICS
        } else {
            &UNDIRECTED_METRICS
        }
    }

    /// Sample metrics use EMD, count metrics the ratio dissimilarity.
    pub fn is_sample(self) -> bool {
        !matches!(
            self,
            MetricKind::UndirectedDistance | MetricKind::DirectedDistance | MetricKind::TriadCensus
        )
    }
}

/// Knobs shared by profiling, dissimilarity and the null baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSettings {
    pub bins: usize,
    /// Distance bucket for unreachable or far pairs.
    pub sentinel: u32,
    pub pagerank: PageRankParams,
    pub null_samples: usize,
    pub baseline_floor: f64,
}

impl Default for MetricSettings {
    fn default() -> Self {
        Self {
            bins: 100,
            sentinel: DEFAULT_SENTINEL,
            pagerank: PageRankParams::default(),
            null_samples: 30,
            baseline_floor: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricData {
    /// One value per node.
    Sample(Vec<f64>),
    /// Per-category counts.
    Counts(Vec<f64>),
}

/// Every metric of one network, in [`MetricKind::for_network`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricProfile {
    pub directed: bool,
    pub node_count: usize,
    pub edge_count: usize,
    pub metrics: Vec<(MetricKind, MetricData)>,
}

impl MetricProfile {
    pub fn get(&self, kind: MetricKind) -> Option<&MetricData> {
        self.metrics.iter().find(|(k, _)| *k == kind).map(|(_, d)| d)
    }
}

/// Counts of pair distances in buckets `1..=sentinel`; farther and
/// unreachable pairs land in the last bucket. Undirected networks count
/// unordered pairs, directed distance counts ordered pairs.
pub fn distance_counts(net: &Network, kind: DistanceKind, sentinel: u32) -> Vec<f64> {
    let sentinel = sentinel.max(1);
    let mut counts = vec![0.0; sentinel as usize];
    let n = net.node_count() as NodeId;
    let ordered = kind != DistanceKind::Undirected && net.is_directed();
    for u in 0..n {
        let row = bfs_distances(net, u, kind);
        let start = if ordered { 0 } else { u + 1 };
        for v in start..n {
            if v == u {
                continue;
            }
            let d = match row[v as usize] {
                UNREACHABLE => sentinel,
                d => d.min(sentinel),
            };
            counts[d as usize - 1] += 1.0;
        }
    }
    counts
}

/// Extracts every metric with exact distances.
pub fn profile(net: &Network, settings: &MetricSettings) -> Result<MetricProfile> {
    if net.node_count() < 3 {
        return Err(Error::input("metric profile needs at least three nodes"));
    }
    let n = net.node_count() as NodeId;
    let degrees = |f: &dyn Fn(NodeId) -> usize| Some(MetricData::Sample((0..n).map(|v| f(v) as f64).collect()));
    let rank = |dir| -> Result<Option<MetricData>> {
        Ok(Some(MetricData::Sample(pagerank(net, &settings.pagerank, dir)?.scores)))
    };
    let mut metrics = Vec::new();
    for &kind in MetricKind::for_network(net.is_directed()) {
        let data = match kind {
            MetricKind::Degree => degrees(&|v| net.total_degree(v)),
            MetricKind::InDegree => degrees(&|v| net.in_degree_unchecked(v)),
            MetricKind::OutDegree => degrees(&|v| net.out_degree_unchecked(v)),
            MetricKind::PageRank | MetricKind::PageRankDirect => rank(PageRankDirection::Direct)?,
            MetricKind::PageRankReverse => rank(PageRankDirection::Reverse)?,
            MetricKind::UndirectedDistance => Some(MetricData::Counts(distance_counts(
                net,
                DistanceKind::Undirected,
                settings.sentinel,
            ))),
            MetricKind::DirectedDistance => Some(MetricData::Counts(distance_counts(
                net,
                DistanceKind::Directed,
                settings.sentinel,
            ))),
            MetricKind::TriadCensus => Some(MetricData::Counts(
                triad_census(net)?.counts.into_iter().map(|c| c as f64).collect(),
            )),
        };
        metrics.extend(data.map(|d| (kind, d)));
    }
    Ok(MetricProfile {
        directed: net.is_directed(),
        node_count: net.node_count(),
        edge_count: net.edge_count(),
        metrics,
    })
}

/// Normalised histogram of `sample` on `bins` equal-width bins over `[lo, hi]`.
pub fn histogram(sample: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; bins];
    let width = (hi - lo) / bins as f64;
    for &x in sample {
        let b = if width > 0.0 {
            (((x - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        h[b] += 1.0;
    }
    let total = sample.len() as f64;
    h.iter_mut().for_each(|x| *x /= total);
    h
}

/// Earth mover's distance between two histograms of equal length, in bins.
pub fn histogram_emd(a: &[f64], b: &[f64]) -> f64 {
    let (mut ca, mut cb, mut total) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        ca += x;
        cb += y;
        total += f64::abs(ca - cb);
    }
    total
}

/// EMD between two samples histogrammed on a shared range.
pub fn emd(a: &[f64], b: &[f64], bins: usize) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::input("EMD needs non-empty samples"));
    }
    if bins == 0 {
        return Err(Error::input("EMD needs at least one bin"));
    }
    let lo = a.iter().chain(b).copied().fold(f64::INFINITY, f64::min);
    let hi = a.iter().chain(b).copied().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Ok(0.0);
    }
    Ok(histogram_emd(
        &histogram(a, lo, hi, bins),
        &histogram(b, lo, hi, bins),
    ))
}

/// `sum |c_i - c'_i| / n0(c'_i)` with `n0(x) = x` for nonzero `x`, else 1.
/// Deliberately asymmetric: `generated` supplies the denominators.
pub fn ratio_dissimilarity(target: &[f64], generated: &[f64]) -> Result<f64> {
    if target.len() != generated.len() {
        return Err(Error::input(format!(
            "count vectors differ in length: {} vs {}",
            target.len(),
            generated.len()
        )));
    }
    Ok(target
        .iter()
        .zip(generated)
        .map(|(&c, &g)| (c - g).abs() / if g != 0.0 { g } else { 1.0 })
        .sum())
}

/// Raw per-metric dissimilarity of `generated` against `target`.
pub fn dissimilarities(
    target: &MetricProfile,
    generated: &MetricProfile,
    settings: &MetricSettings,
) -> Result<Vec<(MetricKind, f64)>> {
    if target.directed != generated.directed {
        return Err(Error::input("cannot compare directed and undirected networks"));
    }
    target
        .metrics
        .iter()
        .map(|(kind, t)| {
            let g = generated
                .get(*kind)
                .ok_or_else(|| Error::input(format!("generated profile lacks {}", kind.key())))?;
            let d = match (t, g) {
                (MetricData::Sample(a), MetricData::Sample(b)) => emd(a, b, settings.bins)?,
                (MetricData::Counts(a), MetricData::Counts(b)) => ratio_dissimilarity(a, b)?,
                _ => return Err(Error::Internal(format!("mixed data for {}", kind.key()))),
            };
            Ok((*kind, d))
        })
        .collect()
}

/// Per-metric mean dissimilarity of a target against its ER null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullBaseline {
    pub node_count: usize,
    pub edge_count: usize,
    pub directed: bool,
    pub samples: usize,
    pub seed: u64,
    pub values: BTreeMap<MetricKind, f64>,
}

impl NullBaseline {
    pub fn get(&self, kind: MetricKind) -> Option<f64> {
        self.values.get(&kind).copied()
    }

    pub fn matches(&self, net: &Network) -> bool {
        self.node_count == net.node_count()
            && self.edge_count == net.edge_count()
            && self.directed == net.is_directed()
    }
}

fn sample_seed(seed: u64, k: u64) -> u64 {
    // splitmix64 finaliser keeps per-sample streams unrelated
    let mut z = seed.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mean dissimilarity between `target` and `settings.null_samples` uniform
/// random networks with the same node count, edge count and directedness.
pub fn null_baseline(target: &Network, settings: &MetricSettings, seed: u64) -> Result<NullBaseline> {
    null_baseline_for(target, &profile(target, settings)?, settings, seed)
}

fn null_baseline_for(
    target: &Network,
    target_profile: &MetricProfile,
    settings: &MetricSettings,
    seed: u64,
) -> Result<NullBaseline> {
    if target.edge_count() == 0 {
        return Err(Error::input("null baseline needs a target with at least one edge"));
    }
    let samples = settings.null_samples.max(1);
    let runs: Vec<Vec<(MetricKind, f64)>> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(sample_seed(seed, k));
            let er = erdos_renyi(target.node_count(), target.edge_count(), target.is_directed(), &mut rng)?;
            dissimilarities(target_profile, &profile(&er, settings)?, settings)
        })
        .collect::<Result<_>>()?;
    let mut values = BTreeMap::new();
    for (i, (kind, _)) in target_profile.metrics.iter().enumerate() {
        let mean = runs.iter().map(|r| r[i].1).sum::<f64>() / samples as f64;
        values.insert(*kind, mean.max(settings.baseline_floor));
    }
    Ok(NullBaseline {
        node_count: target.node_count(),
        edge_count: target.edge_count(),
        directed: target.is_directed(),
        samples,
        seed,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricScore {
    pub metric: MetricKind,
    pub raw: f64,
    pub baseline: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitnessReport {
    pub scores: Vec<MetricScore>,
    /// Largest ratio.
    pub fitness: f64,
    /// Mean ratio.
    pub mean_dissimilarity: f64,
}

impl FitnessReport {
    pub fn ratio(&self, kind: MetricKind) -> Option<f64> {
        self.scores.iter().find(|s| s.metric == kind).map(|s| s.ratio)
    }

    fn from_scores(scores: Vec<MetricScore>) -> Self {
        let fitness = scores.iter().map(|s| s.ratio).fold(0.0, f64::max);
        let mean_dissimilarity = if scores.is_empty() {
            0.0
        } else {
            scores.iter().map(|s| s.ratio).sum::<f64>() / scores.len() as f64
        };
        Self {
            scores,
            fitness,
            mean_dissimilarity,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialises")
    }
}

impl Serialize for FitnessReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            raw: f64,
            baseline: f64,
            ratio: f64,
        }
        let mut map = serializer.serialize_map(Some(self.scores.len() + 2))?;
        for s in &self.scores {
            map.serialize_entry(
                s.metric.key(),
                &Entry {
                    raw: s.raw,
                    baseline: s.baseline,
                    ratio: s.ratio,
                },
            )?;
        }
        map.serialize_entry("fitness", &self.fitness)?;
        map.serialize_entry("mean_dissimilarity", &self.mean_dissimilarity)?;
        map.end()
    }
}

/// Scores `generated` against a target and its baseline.
pub fn fitness_against(
    generated: &MetricProfile,
    target: &MetricProfile,
    baseline: &NullBaseline,
    settings: &MetricSettings,
) -> Result<FitnessReport> {
    if baseline.directed != target.directed || baseline.node_count != target.node_count {
        return Err(Error::input("baseline was built for a different target"));
    }
    let scores = dissimilarities(target, generated, settings)?
        .into_iter()
        .map(|(metric, raw)| {
            let baseline = baseline
                .get(metric)
                .ok_or_else(|| Error::input(format!("baseline lacks {}", metric.key())))?;
            Ok(MetricScore {
                metric,
                raw,
                baseline,
                ratio: raw / baseline,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FitnessReport::from_scores(scores))
}

pub fn fitness(
    generated: &Network,
    target: &Network,
    baseline: &NullBaseline,
    settings: &MetricSettings,
) -> Result<FitnessReport> {
    if generated.is_directed() != target.is_directed() {
        return Err(Error::input("generated and target networks differ in directedness"));
    }
    fitness_against(&profile(generated, settings)?, &profile(target, settings)?, baseline, settings)
}

/// A target network with its profile and baseline computed once.
#[derive(Debug, Clone)]
pub struct TargetEvaluator {
    pub network: Network,
    pub profile: MetricProfile,
    pub baseline: NullBaseline,
    pub settings: MetricSettings,
}

impl TargetEvaluator {
    pub fn new(network: Network, settings: MetricSettings, seed: u64) -> Result<Self> {
        let profile = profile(&network, &settings)?;
        let baseline = null_baseline_for(&network, &profile, &settings, seed)?;
        Ok(Self {
            network,
            profile,
            baseline,
            settings,
        })
    }

    /// Reuses a stored baseline, which must describe this network.
    pub fn with_baseline(network: Network, settings: MetricSettings, baseline: NullBaseline) -> Result<Self> {
        if !baseline.matches(&network) {
            return Err(Error::input("cached baseline does not match the target network"));
        }
        let profile = profile(&network, &settings)?;
        Ok(Self {
            network,
            profile,
            baseline,
            settings,
        })
    }

    pub fn score(&self, generated: &Network) -> Result<FitnessReport> {
        if generated.is_directed() != self.network.is_directed() {
            return Err(Error::input("generated and target networks differ in directedness"));
        }
        if generated.node_count() != self.network.node_count() {
            return Err(Error::input("generated and target networks differ in node count"));
        }
        fitness_against(&profile(generated, &self.settings)?, &self.profile, &self.baseline, &self.settings)
    }
}
