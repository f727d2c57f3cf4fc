//! Rayon-backed drivers for the core searches, plus a wall-clock deadline.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use multicat_core::graph::{
    solve_layouts, CircleSolution, CircularLayout, LayoutExecutor, LayoutSearch, SimpleGraph, Strategy,
};
use multicat_core::module::{
    finish_rank_search, rank_multiplicities_limited, search_ranks, FgZModule, HomSpace, RankMultiplicities, RankSearch,
};
use multicat_core::Deadline;
use rayon::prelude::*;

/// Expires a fixed time after construction.
#[derive(Debug, Clone, Copy)]
pub struct WallClock {
    end: Option<Instant>,
}

impl WallClock {
    pub fn after(limit: Option<Duration>) -> Self {
        WallClock { end: limit.map(|d| Instant::now() + d) }
    }
}

impl Deadline for WallClock {
    fn expired(&self) -> bool {
        self.end.is_some_and(|end| Instant::now() >= end)
    }
}

/// Spreads layout searches over the current rayon pool.
#[derive(Debug, Clone, Copy)]
pub struct RayonLayouts;

impl LayoutExecutor for RayonLayouts {
    fn map_layouts(
        &self,
        layouts: &[CircularLayout],
        f: &(dyn Fn(&CircularLayout) -> LayoutSearch + Sync),
    ) -> Vec<LayoutSearch> {
        layouts.par_iter().map(f).collect()
    }

    fn batch_size(&self) -> usize {
        rayon::current_num_threads() * 4
    }
}

/// `m_map(G : S¹)` using every thread of the current pool.
pub fn solve_circle(g: &SimpleGraph, strategy: Strategy, deadline: &WallClock) -> CircleSolution {
    solve_layouts(g, strategy, &RayonLayouts, deadline)
}

const RANK_CHUNK: u128 = 4096;

/// Same result as [`rank_multiplicities_limited`], scanning candidate chunks
/// in parallel. Chunks after the first one that reaches both lower bounds are
/// skipped; merging keeps the lowest index per rank, so the witness matches
/// the sequential scan.
pub fn rank_multiplicities_parallel(m: &FgZModule, n: &FgZModule, bound: u64, limit: u128) -> RankMultiplicities {
    if m.is_free() && n.is_free() {
        return rank_multiplicities_limited(m, n, bound, limit);
    }
    let space = HomSpace::new(m, n, bound.max(1));
    let end = space.len().map_or(limit, |len| if space.is_complete() { len } else { len.min(limit) });
    let chunks = end.div_ceil(RANK_CHUNK) as usize;
    let first_done = AtomicUsize::new(usize::MAX);
    let found = (0..chunks)
        .into_par_iter()
        .map(|c| {
            if c > first_done.load(Ordering::Relaxed) {
                return RankSearch::default();
            }
            let start = c as u128 * RANK_CHUNK;
            let part = search_ranks(&space, start..(start + RANK_CHUNK).min(end));
            if part.reached_floors {
                first_done.fetch_min(c, Ordering::Relaxed);
            }
            part
        })
        .reduce(RankSearch::default, RankSearch::merge);
    let scanned_all = found.reached_floors || space.len() == Some(end);
    finish_rank_search(&space, found, scanned_all)
}

/// Runs `f` inside a pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool").install(f),
        None => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use multicat_core::graph::solve_exact;
    use multicat_core::module::{parse_module, rank_multiplicities, torsion_modules};
    use multicat_core::NoDeadline;

    #[test]
    fn parallel_circle_matches_sequential() {
        for g in [SimpleGraph::complete(5).unwrap(), SimpleGraph::cycle(6).unwrap(), SimpleGraph::path(4).unwrap()] {
            for s in [Strategy::Exhaustive, Strategy::BranchAndBound] {
                let par = with_threads(Some(3), || solve_circle(&g, s, &WallClock::after(None)));
                assert_eq!(par, solve_exact(&g, s, &NoDeadline));
            }
        }
    }

    #[test]
    fn parallel_ranks_match_sequential() {
        let mixed = ["Z + Z/2", "Z^2", "Z/4", "Z/2 + Z/2", "Z + Z/6"].map(|s| parse_module(s).unwrap());
        let mut corpus = torsion_modules(8);
        corpus.extend(mixed);
        for m in &corpus {
            for n in &corpus {
                let seq = rank_multiplicities(m, n, 3);
                let par = with_threads(Some(4), || {
                    rank_multiplicities_parallel(m, n, 3, multicat_core::module::DEFAULT_CANDIDATE_LIMIT)
                });
                assert_eq!(seq, par, "{m} -> {n}");
            }
        }
    }

    #[test]
    fn wall_clock() {
        assert!(!WallClock::after(None).expired());
        assert!(WallClock::after(Some(Duration::ZERO)).expired());
    }
}
