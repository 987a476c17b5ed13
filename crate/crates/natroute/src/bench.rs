//! Parallel benchmark runner and CSV writers.

use natroute_core::benchmark::{evaluate_pair, sample_pairs, summarize, BenchmarkReport, Sampling};
use natroute_core::network::NetworkStats;
use natroute_core::{Mode, Router};
use rayon::prelude::*;

use crate::engine::SP_NOTE;

/// Parses `all` or `random:N`; the seed is given separately.
pub fn parse_pairs(s: &str, seed: u64) -> Result<Sampling, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(Sampling::AllPairs);
    }
    let n = s
        .strip_prefix("random:")
        .ok_or_else(|| format!("expected all or random:N, got {s:?}"))?
        .parse::<usize>()
        .map_err(|e| format!("bad pair count in {s:?}: {e}"))?;
    Ok(Sampling::Random { n, seed })
}

/// Evaluates sampled pairs on `threads` workers (all cores when `None`).
/// The report does not depend on the thread count.
pub fn run_parallel(
    router: &Router,
    sampling: Sampling,
    modes: &[Mode],
    threads: Option<usize>,
) -> Result<BenchmarkReport, rayon::ThreadPoolBuildError> {
    let sampled = sample_pairs(router.network(), sampling);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    let results = pool.install(|| {
        sampled.pairs.par_iter().map(|&(o, d)| evaluate_pair(router, o, d, modes)).collect::<Vec<_>>()
    });
    Ok(summarize(results, sampled.warnings))
}

/// Benchmark CSV preceded by a `#` line labelling the SP baseline.
pub fn report_csv(report: &BenchmarkReport) -> String {
    format!("# {SP_NOTE}\n{}", report.to_csv())
}

pub const STATS_HEADER: &str = "network,arcs,arcs_x,roads_i,roads_i_x,roads_ii,roads_ii_x,roads_i_per_arc";

pub fn stats_csv(name: &str, s: &NetworkStats) -> String {
    format!(
        "{STATS_HEADER}\n{},{},{},{},{},{},{},{:.6}\n",
        name.replace([',', '\n'], "_"),
        s.arcs,
        s.arcs_x,
        s.roads_i,
        s.roads_i_x,
        s.roads_ii,
        s.roads_ii_x,
        s.size_ratio()
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use natroute_core::benchmark::run_benchmark;
    use natroute_core::{fixtures, SplitParams};

    #[test]
    fn parses_pair_specs() {
        assert_eq!(parse_pairs("all", 3), Ok(Sampling::AllPairs));
        assert_eq!(parse_pairs("random:10", 3), Ok(Sampling::Random { n: 10, seed: 3 }));
        assert!(parse_pairs("random:", 0).is_err());
        assert!(parse_pairs("some", 0).is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let router = Router::new(fixtures::perturbed_grid(5, 5, 5.0, 2), 45.0, SplitParams::new(1.0, 0.2).unwrap());
        let sampling = Sampling::Random { n: 60, seed: 9 };
        let seq = run_benchmark(&router, sampling, &Mode::ALL);
        for threads in [1, 3] {
            let par = run_parallel(&router, sampling, &Mode::ALL, Some(threads)).unwrap();
            assert_eq!(report_csv(&par), report_csv(&seq));
        }
    }
}
