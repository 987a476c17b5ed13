//! Pairwise route comparison between modes.
//!
//! Distances are compared with two aggregates: the mean of per-pair
//! relative differences (alpha) and the relative difference of the means
//! (beta). Beta is the primary figure; alpha is kept as a side column.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::network::{JunctionId, RoadNetwork};
use crate::routing::{Anchor, Mode, RouteError, Router};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatsError {
    Empty,
    LengthMismatch,
    /// `ys[index]` is zero.
    ZeroDenominator { index: usize },
    ZeroMean,
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::Empty => write!(f, "no values"),
            StatsError::LengthMismatch => write!(f, "value lists differ in length"),
            StatsError::ZeroDenominator { index } => write!(f, "zero denominator at index {index}"),
            StatsError::ZeroMean => write!(f, "mean of denominators is zero"),
        }
    }
}

impl core::error::Error for StatsError {}

fn check(xs: &[f64], ys: &[f64]) -> Result<(), StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch);
    }
    if xs.is_empty() {
        return Err(StatsError::Empty);
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Mean over i of `(xs[i] - ys[i]) / ys[i]`.
pub fn mean_of_ratios(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    check(xs, ys)?;
    let mut sum = 0.0;
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if y == 0.0 {
            return Err(StatsError::ZeroDenominator { index: i });
        }
        sum += (x - y) / y;
    }
    Ok(sum / xs.len() as f64)
}

/// `(mean(xs) - mean(ys)) / mean(ys)`.
pub fn ratio_of_means(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    check(xs, ys)?;
    let my = mean(ys);
    if my == 0.0 {
        return Err(StatsError::ZeroMean);
    }
    Ok((mean(xs) - my) / my)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    AllPairs,
    Random { n: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledPairs {
    /// Ordered pairs of distinct junctions, ascending.
    pub pairs: Vec<(JunctionId, JunctionId)>,
    pub warnings: Vec<String>,
}

pub fn sample_pairs(net: &RoadNetwork, sampling: Sampling) -> SampledPairs {
    let n = net.junctions().len();
    let total = n * n.saturating_sub(1);
    let decode = |i: usize| {
        let o = i / (n - 1);
        let r = i % (n - 1);
        let d = if r < o { r } else { r + 1 };
        (JunctionId(o as u32), JunctionId(d as u32))
    };
    let mut warnings = Vec::new();
    let pairs = match sampling {
        Sampling::AllPairs => (0..total).map(decode).collect(),
        Sampling::Random { n: want, seed } => {
            let k = if want > total {
                warnings.push(format!("requested {want} pairs but only {total} exist; using all of them"));
                total
            } else {
                want
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picked: Vec<usize> = index::sample(&mut rng, total, k).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(decode).collect()
        }
    };
    SampledPairs { pairs, warnings }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeOutcome {
    pub distance: f64,
    pub turns_topological: u32,
    pub turns_perceptual: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairResult {
    pub origin: JunctionId,
    pub destination: JunctionId,
    pub outcomes: Vec<(Mode, Result<ModeOutcome, RouteError>)>,
}

impl PairResult {
    pub fn outcome(&self, mode: Mode) -> Option<&ModeOutcome> {
        self.outcomes.iter().find(|(m, _)| *m == mode).and_then(|(_, r)| r.as_ref().ok())
    }

    pub fn is_complete(&self) -> bool {
        self.outcomes.iter().all(|(_, r)| r.is_ok())
    }
}

/// Routes one junction pair in every requested mode.
pub fn evaluate_pair(router: &Router, origin: JunctionId, destination: JunctionId, modes: &[Mode]) -> PairResult {
    let net = router.network();
    let from = Anchor::at_junction(net, origin);
    let to = Anchor::at_junction(net, destination);
    let outcomes = modes
        .iter()
        .map(|&m| {
            let r = router.route(m, from, to).map(|r| ModeOutcome {
                distance: r.distance,
                turns_topological: r.turns_topological,
                turns_perceptual: r.turns_perceptual,
            });
            (m, r)
        })
        .collect();
    PairResult { origin, destination, outcomes }
}

/// Mode pairs compared in reports, as (mode1, mode2).
pub const COMPARISONS: [(Mode, Mode); 5] = [
    (Mode::FewestTurn, Mode::Simplest),
    (Mode::FewestTurn, Mode::Shortest),
    (Mode::FewestTurnShortest, Mode::Simplest),
    (Mode::FewestTurnShortest, Mode::Shortest),
    (Mode::Simplest, Mode::Shortest),
];

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonStats {
    pub mode1: Mode,
    pub mode2: Mode,
    /// Mean of ratios of distances; `None` when undefined.
    pub alpha: Option<f64>,
    /// Ratio of mean distances; `None` when undefined.
    pub beta: Option<f64>,
    pub n: usize,
    pub excluded: usize,
    pub turns_mode1: f64,
    pub turns_mode2: f64,
    pub perceptual_mode1: f64,
    pub perceptual_mode2: f64,
    /// Mean of (mode1 turns - mode2 turns).
    pub turn_delta_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub sampled: usize,
    pub excluded: usize,
    /// Sorted by (origin, destination).
    pub pairs: Vec<PairResult>,
    pub comparisons: Vec<ComparisonStats>,
    pub warnings: Vec<String>,
}

/// Aggregates pair results. Input order does not matter.
pub fn summarize(mut results: Vec<PairResult>, warnings: Vec<String>) -> BenchmarkReport {
    results.sort_by_key(|r| (r.origin, r.destination));
    let sampled = results.len();
    let complete: Vec<&PairResult> = results.iter().filter(|r| r.is_complete()).collect();
    let excluded = sampled - complete.len();
    let mut comparisons = Vec::new();
    for (m1, m2) in COMPARISONS {
        let has = |m: Mode| results.first().is_some_and(|r| r.outcomes.iter().any(|(x, _)| *x == m));
        if !has(m1) || !has(m2) {
            continue;
        }
        let a: Vec<&ModeOutcome> = complete.iter().filter_map(|r| r.outcome(m1)).collect();
        let b: Vec<&ModeOutcome> = complete.iter().filter_map(|r| r.outcome(m2)).collect();
        let xs: Vec<f64> = a.iter().map(|o| o.distance).collect();
        let ys: Vec<f64> = b.iter().map(|o| o.distance).collect();
        let avg = |v: &[&ModeOutcome], f: fn(&ModeOutcome) -> u32| -> f64 {
            if v.is_empty() {
                0.0
            } else {
                v.iter().map(|o| f64::from(f(o))).sum::<f64>() / v.len() as f64
            }
        };
        let t1 = avg(&a, |o| o.turns_topological);
        let t2 = avg(&b, |o| o.turns_topological);
        comparisons.push(ComparisonStats {
            mode1: m1,
            mode2: m2,
            alpha: mean_of_ratios(&xs, &ys).ok(),
            beta: ratio_of_means(&xs, &ys).ok(),
            n: complete.len(),
            excluded,
            turns_mode1: t1,
            turns_mode2: t2,
            perceptual_mode1: avg(&a, |o| o.turns_perceptual),
            perceptual_mode2: avg(&b, |o| o.turns_perceptual),
            turn_delta_mean: t1 - t2,
        });
    }
    BenchmarkReport { sampled, excluded, pairs: results, comparisons, warnings }
}

/// Samples pairs and evaluates them one after another.
pub fn run_benchmark(router: &Router, sampling: Sampling, modes: &[Mode]) -> BenchmarkReport {
    let sampled = sample_pairs(router.network(), sampling);
    let results = sampled.pairs.iter().map(|&(o, d)| evaluate_pair(router, o, d, modes)).collect();
    summarize(results, sampled.warnings)
}

pub const CSV_HEADER: &str =
    "pair,D_percent_beta,D_percent_alpha,T_mode1,T_mode2,n,excluded,Tp_mode1,Tp_mode2,T_delta_mean";

fn percent(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{:.6}", x * 100.0),
        None => String::from("NA"),
    }
}

impl BenchmarkReport {
    pub fn comparison(&self, mode1: Mode, mode2: Mode) -> Option<&ComparisonStats> {
        self.comparisons.iter().find(|c| c.mode1 == mode1 && c.mode2 == mode2)
    }

    /// One row per compared mode pair; distances as percentages.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for c in &self.comparisons {
            let _ = writeln!(
                out,
                "{}/{},{},{},{:.6},{:.6},{},{},{:.6},{:.6},{:.6}",
                c.mode1.tag(),
                c.mode2.tag(),
                percent(c.beta),
                percent(c.alpha),
                c.turns_mode1,
                c.turns_mode2,
                c.n,
                c.excluded,
                c.perceptual_mode1,
                c.perceptual_mode2,
                c.turn_delta_mean
            );
        }
        out
    }
}
