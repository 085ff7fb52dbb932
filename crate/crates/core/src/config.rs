//! Flat `key = value` configuration files.
//!
//! Blank lines and `#` comments are ignored. Unknown keys are rejected so a
//! typo never silently falls back to a default.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::dsl::InitParams;
use crate::evolve::SearchConfig;
use crate::graph::{DistanceMode, PageRankParams, DEFAULT_SENTINEL};
use crate::metrics::MetricSettings;
use crate::netgen::GenerationConfig;
use crate::{Error, Result};

/// Every tunable parameter, with the published defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub sampling_ratio: f64,
    pub sample_floor: usize,
    pub anti_bloat: f64,
    pub snapshot_tolerance: f64,
    pub bins: usize,
    pub d_min: usize,
    pub d_max: usize,
    pub p_terminal: f64,
    pub infinite_distance: u32,
    pub stagnation: usize,
    pub max_steps: Option<usize>,
    pub rw_steps: usize,
    pub distance_mode: DistanceMode,
    pub recombination: bool,
    pub recombination_probability: f64,
    pub per_snapshot_slots: bool,
    pub pagerank_alpha: f64,
    pub pagerank_tolerance: f64,
    pub pagerank_max_iterations: usize,
    pub null_samples: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            sampling_ratio: 0.0006,
            sample_floor: 2,
            anti_bloat: 0.10,
            snapshot_tolerance: 0.05,
            bins: 100,
            d_min: 2,
            d_max: 5,
            p_terminal: 0.4,
            infinite_distance: DEFAULT_SENTINEL,
            stagnation: 1000,
            max_steps: None,
            rw_steps: 5,
            distance_mode: DistanceMode::Heuristic,
            recombination: true,
            recombination_probability: 0.5,
            per_snapshot_slots: false,
            pagerank_alpha: 0.85,
            pagerank_tolerance: 1e-8,
            pagerank_max_iterations: 200,
            null_samples: 30,
        }
    }
}

pub const KEYS: [&str; 20] = [
    "sampling_ratio",
    "sample_floor",
    "anti_bloat",
    "snapshot_tolerance",
    "bins",
    "d_min",
    "d_max",
    "p_terminal",
    "infinite_distance",
    "stagnation",
    "max_steps",
    "rw_steps",
    "distance_mode",
    "recombination",
    "recombination_probability",
    "per_snapshot_slots",
    "pagerank_alpha",
    "pagerank_tolerance",
    "pagerank_max_iterations",
    "null_samples",
];

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::input(format!("invalid value {value:?} for {key}")))
}

fn flag(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::input(format!("invalid boolean {value:?} for {key}"))),
    }
}

impl Settings {
    /// Parses a config document on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Self::default();
        let mut unknown = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::input(format!("line {}: expected key = value", lineno + 1)));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                unknown.push(key.to_string());
                continue;
            }
            s.set(key, value.trim())
                .map_err(|e| Error::input(format!("line {}: {e}", lineno + 1)))?;
        }
        if !unknown.is_empty() {
            return Err(Error::input(format!("unknown config keys: {}", unknown.join(", "))));
        }
        s.validate()?;
        Ok(s)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "sampling_ratio" => self.sampling_ratio = num(key, value)?,
            "sample_floor" => self.sample_floor = num(key, value)?,
            "anti_bloat" => self.anti_bloat = num(key, value)?,
            "snapshot_tolerance" => self.snapshot_tolerance = num(key, value)?,
            "bins" => self.bins = num(key, value)?,
            "d_min" => self.d_min = num(key, value)?,
            "d_max" => self.d_max = num(key, value)?,
            "p_terminal" => self.p_terminal = num(key, value)?,
            "infinite_distance" => self.infinite_distance = num(key, value)?,
            "stagnation" => self.stagnation = num(key, value)?,
            "max_steps" => {
                self.max_steps = match value {
                    "none" | "" => None,
                    v => Some(num(key, v)?),
                }
            }
            "rw_steps" => self.rw_steps = num(key, value)?,
            "distance_mode" => {
                self.distance_mode = match value {
                    "exact" => DistanceMode::Exact,
                    "heuristic" => DistanceMode::Heuristic,
                    _ => return Err(Error::input(format!("distance_mode must be exact or heuristic, got {value:?}"))),
                }
            }
            "recombination" => self.recombination = flag(key, value)?,
            "recombination_probability" => self.recombination_probability = num(key, value)?,
            "per_snapshot_slots" => self.per_snapshot_slots = flag(key, value)?,
            "pagerank_alpha" => self.pagerank_alpha = num(key, value)?,
            "pagerank_tolerance" => self.pagerank_tolerance = num(key, value)?,
            "pagerank_max_iterations" => self.pagerank_max_iterations = num(key, value)?,
            "null_samples" => self.null_samples = num(key, value)?,
            _ => return Err(Error::input(format!("unknown config key {key}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| if ok { Ok(()) } else { Err(Error::input(what.to_string())) };
        check(self.sampling_ratio > 0.0 && self.sampling_ratio <= 1.0, "sampling_ratio must lie in (0, 1]")?;
        check(self.sample_floor >= 1, "sample_floor must be at least 1")?;
        check(self.anti_bloat >= 0.0, "anti_bloat must be non-negative")?;
        check(self.snapshot_tolerance >= 0.0, "snapshot_tolerance must be non-negative")?;
        check(self.bins >= 1, "bins must be at least 1")?;
        check(self.d_min >= 1 && self.d_min <= self.d_max, "need 1 <= d_min <= d_max")?;
        check((0.0..=1.0).contains(&self.p_terminal), "p_terminal must lie in [0, 1]")?;
        check(self.infinite_distance >= 2, "infinite_distance must be at least 2")?;
        check(self.stagnation >= 1, "stagnation must be at least 1")?;
        check(self.rw_steps >= 1, "rw_steps must be at least 1")?;
        check(
            (0.0..=1.0).contains(&self.recombination_probability),
            "recombination_probability must lie in [0, 1]",
        )?;
        check(self.pagerank_alpha > 0.0 && self.pagerank_alpha < 1.0, "pagerank_alpha must lie in (0, 1)")?;
        check(self.pagerank_tolerance > 0.0, "pagerank_tolerance must be positive")?;
        check(self.pagerank_max_iterations >= 1, "pagerank_max_iterations must be at least 1")?;
        check(self.null_samples >= 1, "null_samples must be at least 1")
    }

    /// Renders the settings as a config document that parses back identically.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let value = match key {
                "sampling_ratio" => self.sampling_ratio.to_string(),
                "sample_floor" => self.sample_floor.to_string(),
                "anti_bloat" => self.anti_bloat.to_string(),
                "snapshot_tolerance" => self.snapshot_tolerance.to_string(),
                "bins" => self.bins.to_string(),
                "d_min" => self.d_min.to_string(),
                "d_max" => self.d_max.to_string(),
                "p_terminal" => self.p_terminal.to_string(),
                "infinite_distance" => self.infinite_distance.to_string(),
                "stagnation" => self.stagnation.to_string(),
                "max_steps" => self.max_steps.map_or("none".into(), |m| m.to_string()),
                "rw_steps" => self.rw_steps.to_string(),
                "distance_mode" => match self.distance_mode {
                    DistanceMode::Exact => "exact".into(),
                    DistanceMode::Heuristic => "heuristic".into(),
                },
                "recombination" => self.recombination.to_string(),
                "recombination_probability" => self.recombination_probability.to_string(),
                "per_snapshot_slots" => self.per_snapshot_slots.to_string(),
                "pagerank_alpha" => self.pagerank_alpha.to_string(),
                "pagerank_tolerance" => self.pagerank_tolerance.to_string(),
                "pagerank_max_iterations" => self.pagerank_max_iterations.to_string(),
                "null_samples" => self.null_samples.to_string(),
                _ => unreachable!(),
            };
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    pub fn metric_settings(&self) -> MetricSettings {
        MetricSettings {
            bins: self.bins,
            sentinel: self.infinite_distance,
            pagerank: PageRankParams {
                alpha: self.pagerank_alpha,
                beta: None,
                tolerance: self.pagerank_tolerance,
                max_iterations: self.pagerank_max_iterations,
            },
            null_samples: self.null_samples,
            ..MetricSettings::default()
        }
    }

    pub fn generation_config(&self, nodes: usize, edges: usize, directed: bool, seed: u64) -> GenerationConfig {
        GenerationConfig {
            sampling_ratio: self.sampling_ratio,
            sample_floor: self.sample_floor,
            distance_mode: self.distance_mode,
            rw_steps_per_edge: self.rw_steps,
            sentinel: self.infinite_distance,
            seed,
            ..GenerationConfig::new(nodes, edges, directed)
        }
    }

    /// Search configuration; node and edge counts come from the targets.
    pub fn search_config(&self, directed: bool, seed: u64) -> SearchConfig {
        SearchConfig {
            anti_bloat: self.anti_bloat,
            snapshot_tolerance: self.snapshot_tolerance,
            stagnation: self.stagnation,
            max_steps: self.max_steps,
            recombination: self.recombination,
            recombination_probability: self.recombination_probability,
            per_snapshot_slots: self.per_snapshot_slots,
            generation: self.generation_config(2, 1, directed, seed),
            init: InitParams {
                d_min: self.d_min,
                d_max: self.d_max,
                p_terminal: self.p_terminal,
                ..InitParams::for_network(directed)
            },
            metrics: self.metric_settings(),
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let s = Settings::default();
        assert_eq!(Settings::parse(&s.to_document()).unwrap(), s);
    }

    #[test]
    fn shipped_config_is_the_default() {
        let text = include_str!("../../../config/default.conf");
        assert_eq!(Settings::parse(text).unwrap(), Settings::default());
    }

    #[test]
    fn parses_comments_and_overrides() {
        let s = Settings::parse("# table values\nsampling_ratio = 0.001\n\nrecombination=off  # inline\nmax_steps = 50\n").unwrap();
        assert_eq!(s.sampling_ratio, 0.001);
        assert!(!s.recombination);
        assert_eq!(s.max_steps, Some(50));
        assert_eq!(s.bins, 100);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let err = Settings::parse("bins = 10\nbogus = 1\nother = 2\n").unwrap_err().to_string();
        assert!(err.contains("bogus") && err.contains("other"), "{err}");
        assert!(Settings::parse("bins = ten").is_err());
        assert!(Settings::parse("p_terminal = 1.5").is_err());
        assert!(Settings::parse("d_min = 6").is_err());
        assert!(Settings::parse("just text").is_err());
    }
}
