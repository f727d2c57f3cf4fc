//! Minimal map-multiplicity of a graph over the circle.
//!
//! Only canonical maps are searched: vertices go to distinct points of the
//! circle and every edge runs homeomorphically along one of the two arcs
//! joining its endpoints. Such a map is described by a cyclic order of the
//! vertices ([`CircularLayout`]) and a direction per edge ([`ArcAssignment`]).
//! Maps collapsing an edge to a point have infinite multiplicity, and any other
//! map can be deformed into canonical form without growing a fiber.
//!
//! With `n` vertices the circle minus the vertex images splits into `n` gaps;
//! gap `i` lies between positions `i` and `i + 1 (mod n)`. The fiber over a gap
//! point counts the edges covering that gap; the fiber over a vertex position
//! is one plus the number of edges passing strictly through it.

use alloc::vec;
use alloc::vec::Vec;
use core::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::{is_permutation, GraphError, SimpleGraph};
use crate::category::Deadline;
use crate::value::{Certificate, MultValue, WitnessedMultiplicity};

/// Cyclic order of the vertices around the circle, rotated so that vertex 0
/// sits at position 0. Two layouts compare equal iff they agree up to rotation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CircularLayout {
    order: Vec<usize>,
}

impl CircularLayout {
    /// `order[p]` is the vertex placed at position `p`.
    pub fn new(order: Vec<usize>) -> Result<Self, GraphError> {
        let n = order.len();
        if n == 0 || !is_permutation(&order, n) {
            return Err(GraphError::BadLayout(n));
        }
        let zero = order.iter().position(|&v| v == 0).unwrap_or(0);
        let mut order = order;
        order.rotate_left(zero);
        Ok(CircularLayout { order })
    }

    pub fn natural(n: usize) -> Self {
        CircularLayout { order: (0..n).collect() }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Position of each vertex.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (p, &v) in self.order.iter().enumerate() {
            pos[v] = p;
        }
        pos
    }

    /// The same cyclic order read the other way round.
    pub fn reflected(&self) -> Self {
        let mut order = self.order.clone();
        order[1..].reverse();
        CircularLayout { order }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcDirection {
    /// From the smaller-numbered endpoint towards increasing positions.
    Cw,
    Ccw,
}

/// One direction per edge, in the graph's edge order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArcAssignment {
    pub directions: Vec<ArcDirection>,
}

impl ArcAssignment {
    pub fn new(directions: Vec<ArcDirection>) -> Self {
        ArcAssignment { directions }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberProfile {
    /// Edges covering gap `i` (between positions `i` and `i + 1`).
    pub gap_counts: Vec<usize>,
    /// Fiber size over the vertex at position `p`.
    pub vertex_counts: Vec<usize>,
    pub max_fiber: usize,
}

/// A canonical map: where the vertices go and which arc each edge takes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CircleWitness {
    pub layout: CircularLayout,
    pub arcs: ArcAssignment,
}

pub type CircleSolution = WitnessedMultiplicity<CircleWitness>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Every layout and every arc assignment, no pruning.
    Exhaustive,
    /// Depth-first over arc assignments with fiber and pigeonhole pruning.
    BranchAndBound,
}

/// Arc of one edge under a layout: start position and number of gaps covered
/// in each direction.
#[derive(Debug, Clone, Copy)]
struct EdgeArc {
    from: usize,
    to: usize,
    cw_len: usize,
}

impl EdgeArc {
    fn span(&self, dir: ArcDirection, n: usize) -> (usize, usize) {
        match dir {
            ArcDirection::Cw => (self.from, self.cw_len),
            ArcDirection::Ccw => (self.to, n - self.cw_len),
        }
    }

    fn min_len(&self, n: usize) -> usize {
        self.cw_len.min(n - self.cw_len)
    }
}

fn edge_arcs(g: &SimpleGraph, layout: &CircularLayout) -> Vec<EdgeArc> {
    let n = layout.len();
    let pos = layout.positions();
    g.edges()
        .iter()
        .map(|&(u, v)| {
            let (from, to) = (pos[u], pos[v]);
            EdgeArc { from, to, cw_len: (to + n - from) % n }
        })
        .collect()
}

/// Exact fibers of the canonical map given by `layout` and `arcs`.
pub fn evaluate(g: &SimpleGraph, layout: &CircularLayout, arcs: &ArcAssignment) -> Result<FiberProfile, GraphError> {
    let n = g.vertex_count();
    if layout.len() != n {
        return Err(GraphError::BadLayout(n));
    }
    if arcs.directions.len() != g.edge_count() {
        return Err(GraphError::BadArcs { expected: g.edge_count(), got: arcs.directions.len() });
    }
    let mut gap_counts = vec![0; n];
    let mut vertex_counts = vec![1; n];
    for (arc, &dir) in edge_arcs(g, layout).iter().zip(&arcs.directions) {
        let (start, len) = arc.span(dir, n);
        for k in 0..len {
            gap_counts[(start + k) % n] += 1;
            if k > 0 {
                vertex_counts[(start + k) % n] += 1;
            }
        }
    }
    let max_fiber = gap_counts.iter().chain(&vertex_counts).copied().max().unwrap_or(0);
    Ok(FiberProfile { gap_counts, vertex_counts, max_fiber })
}

/// `max(1, ⌈|E| / |V|⌉)`: each edge covers at least one of the `|V|` gaps.
pub fn pigeonhole_lower_bound(g: &SimpleGraph) -> usize {
    g.edge_count().div_ceil(g.vertex_count()).max(1)
}

/// Floor for a fixed layout: every edge covers at least its shorter arc.
fn layout_lower_bound(arcs: &[EdgeArc], n: usize) -> usize {
    arcs.iter().map(|a| a.min_len(n)).sum::<usize>().div_ceil(n).max(1)
}

/// Layouts with vertex 0 at position 0, one representative per reflection
/// pair, in lexicographic order.
pub fn layouts(n: usize) -> impl Iterator<Item = CircularLayout> {
    // Lexicographic permutations of 1..n via the classic next-permutation step.
    let mut next: Option<Vec<usize>> = (n > 0).then(|| (0..n).collect());
    core::iter::from_fn(move || loop {
        let current = next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ[1..]) {
            next = Some(succ);
        }
        if n < 3 || current[1] < current[n - 1] {
            return Some(CircularLayout { order: current });
        }
    })
}

fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let Some(i) = (0..xs.len() - 1).rev().find(|&i| xs[i] < xs[i + 1]) else {
        return false;
    };
    let j = (i + 1..xs.len()).rev().find(|&j| xs[j] > xs[i]).unwrap_or(i + 1);
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

/// What a single-layout search accepts.
#[derive(Clone, Copy)]
pub enum Target<'a> {
    /// Values strictly below a shared, monotonically decreasing bound.
    Below(&'a AtomicUsize),
    /// Values at most this.
    AtMost(usize),
    /// Anything.
    Unbounded,
}

impl Target<'_> {
    /// Exclusive threshold right now.
    fn threshold(&self) -> usize {
        match self {
            Target::Below(b) => b.load(Ordering::Relaxed),
            Target::AtMost(v) => v + 1,
            Target::Unbounded => usize::MAX,
        }
    }
}

/// Outcome of searching one layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutSearch {
    /// Smallest value found below the target, with the lexicographically first
    /// assignment reaching it (among those not pruned by a moving target).
    pub best: Option<(usize, ArcAssignment)>,
    /// The deadline fired before the layout was fully searched.
    pub interrupted: bool,
}

struct Dfs<'a, D: Deadline + ?Sized> {
    n: usize,
    arcs: Vec<EdgeArc>,
    /// Sum of shortest-arc lengths over edges `i..`.
    suffix_min: Vec<usize>,
    gaps: Vec<usize>,
    through: Vec<usize>,
    covered: usize,
    dirs: Vec<ArcDirection>,
    prune: bool,
    first_only: bool,
    target: Target<'a>,
    local: usize,
    best: Option<(usize, ArcAssignment)>,
    deadline: &'a D,
    nodes: u64,
    interrupted: bool,
}

impl<D: Deadline + ?Sized> Dfs<'_, D> {
    fn threshold(&self) -> usize {
        self.local.min(self.target.threshold())
    }

    fn apply(&mut self, start: usize, len: usize, delta: isize) {
        for k in 0..len {
            let p = (start + k) % self.n;
            self.gaps[p] = self.gaps[p].wrapping_add_signed(delta);
            if k > 0 {
                self.through[p] = self.through[p].wrapping_add_signed(delta);
            }
        }
        self.covered = self.covered.wrapping_add_signed(delta * len as isize);
    }

    /// Whether an arc can be added without reaching `limit`.
    fn fits(&self, start: usize, len: usize, limit: usize) -> bool {
        (0..len).all(|k| {
            let p = (start + k) % self.n;
            self.gaps[p] + 1 < limit && (k == 0 || self.through[p] + 2 < limit)
        })
    }

    /// Returns `true` to stop the whole search.
    fn run(&mut self, depth: usize) -> bool {
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) && self.deadline.expired() {
            self.interrupted = true;
            return true;
        }
        if depth == self.arcs.len() {
            let value =
                self.gaps.iter().copied().max().unwrap_or(0).max(1 + self.through.iter().copied().max().unwrap_or(0));
            if value < self.threshold() {
                self.local = value;
                self.best = Some((value, ArcAssignment::new(self.dirs.clone())));
                return self.first_only;
            }
            return false;
        }
        for dir in [ArcDirection::Cw, ArcDirection::Ccw] {
            let (start, len) = self.arcs[depth].span(dir, self.n);
            if self.prune {
                let limit = self.threshold();
                if !self.fits(start, len, limit) {
                    continue;
                }
                let total = self.covered + len + self.suffix_min[depth + 1];
                if total.div_ceil(self.n).max(1) >= limit {
                    continue;
                }
            }
            self.apply(start, len, 1);
            self.dirs.push(dir);
            let stop = self.run(depth + 1);
            self.dirs.pop();
            self.apply(start, len, -1);
            if stop {
                return true;
            }
        }
        false
    }
}

/// Searches the arc assignments of one layout.
///
/// With `first_only`, stops at the lexicographically first assignment meeting
/// the target; otherwise keeps tightening to the layout's minimum.
pub fn search_layout<D: Deadline + ?Sized>(
    g: &SimpleGraph,
    layout: &CircularLayout,
    strategy: Strategy,
    target: Target<'_>,
    first_only: bool,
    deadline: &D,
) -> LayoutSearch {
    let n = g.vertex_count();
    let arcs = edge_arcs(g, layout);
    let prune = strategy == Strategy::BranchAndBound;
    if deadline.expired() {
        return LayoutSearch { best: None, interrupted: true };
    }
    if prune && layout_lower_bound(&arcs, n) >= target.threshold() {
        return LayoutSearch { best: None, interrupted: false };
    }
    let mut suffix_min = vec![0; arcs.len() + 1];
    for i in (0..arcs.len()).rev() {
        suffix_min[i] = suffix_min[i + 1] + arcs[i].min_len(n);
    }
    let mut dfs = Dfs {
        n,
        arcs,
        suffix_min,
        gaps: vec![0; n],
        through: vec![0; n],
        covered: 0,
        dirs: Vec::with_capacity(g.edge_count()),
        prune,
        first_only,
        target,
        local: usize::MAX,
        best: None,
        deadline,
        nodes: 0,
        interrupted: false,
    };
    dfs.run(0);
    LayoutSearch { best: dfs.best, interrupted: dfs.interrupted }
}

/// Runs per-layout searches, possibly in parallel.
pub trait LayoutExecutor {
    /// Applies `f` to every layout and returns the results in input order.
    fn map_layouts(
        &self,
        layouts: &[CircularLayout],
        f: &(dyn Fn(&CircularLayout) -> LayoutSearch + Sync),
    ) -> Vec<LayoutSearch>;

    /// How many layouts the first-hit phase hands over at once.
    fn batch_size(&self) -> usize {
        1
    }
}

/// Runs layouts one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl LayoutExecutor for Sequential {
    fn map_layouts(
        &self,
        layouts: &[CircularLayout],
        f: &(dyn Fn(&CircularLayout) -> LayoutSearch + Sync),
    ) -> Vec<LayoutSearch> {
        layouts.iter().map(f).collect()
    }
}

const BLOCK: usize = 2048;

fn shortest_arcs(g: &SimpleGraph, layout: &CircularLayout) -> ArcAssignment {
    let n = g.vertex_count();
    ArcAssignment::new(
        edge_arcs(g, layout)
            .iter()
            .map(|a| if a.cw_len <= n - a.cw_len { ArcDirection::Cw } else { ArcDirection::Ccw })
            .collect(),
    )
}

fn count(value: usize) -> MultValue {
    MultValue::count(value as u64)
}

/// `m_map(G : S¹)` on the calling thread. See [`solve_layouts`].
pub fn solve_exact<D: Deadline + Sync + ?Sized>(g: &SimpleGraph, strategy: Strategy, deadline: &D) -> CircleSolution {
    solve_layouts(g, strategy, &Sequential, deadline)
}

/// `m_map(G : S¹)` over all canonical maps, with the lexicographically least
/// optimal `(layout, arcs)` as witness.
///
/// If the deadline fires, the best map found so far is returned with an
/// `UpperBound` certificate, unless it already meets the pigeonhole floor.
pub fn solve_layouts<E, D>(g: &SimpleGraph, strategy: Strategy, executor: &E, deadline: &D) -> CircleSolution
where
    E: LayoutExecutor + ?Sized,
    D: Deadline + Sync + ?Sized,
{
    let n = g.vertex_count();
    let floor = pigeonhole_lower_bound(g);

    let start = CircularLayout::natural(n);
    let start_arcs = shortest_arcs(g, &start);
    let start_value = evaluate(g, &start, &start_arcs).map(|p| p.max_fiber).unwrap_or(usize::MAX);
    let mut best = (start_value, CircleWitness { layout: start, arcs: start_arcs });
    let mut interrupted = false;

    let finish = |best: (usize, CircleWitness), interrupted: bool| CircleSolution {
        value: count(best.0),
        witness: Some(best.1),
        certificate: if !interrupted || best.0 <= floor { Certificate::Exact } else { Certificate::UpperBound },
    };

    match strategy {
        Strategy::Exhaustive => {
            let mut found: Option<(usize, CircleWitness)> = None;
            let mut all = layouts(n).peekable();
            while all.peek().is_some() && !interrupted {
                let block: Vec<CircularLayout> = all.by_ref().take(BLOCK).collect();
                let f = |l: &CircularLayout| search_layout(g, l, strategy, Target::Unbounded, false, deadline);
                for (layout, outcome) in block.iter().zip(executor.map_layouts(&block, &f)) {
                    interrupted |= outcome.interrupted;
                    if let Some((value, arcs)) = outcome.best {
                        if found.as_ref().is_none_or(|(v, _)| value < *v) {
                            found = Some((value, CircleWitness { layout: layout.clone(), arcs }));
                        }
                    }
                }
            }
            if let Some(f) = found {
                if !interrupted || f.0 < best.0 {
                    best = f;
                }
            }
            finish(best, interrupted)
        }
        Strategy::BranchAndBound => {
            // Find the optimal value, then the first witness attaining it.
            let shared = AtomicUsize::new(best.0);
            if best.0 > floor {
                let mut all = layouts(n).peekable();
                while all.peek().is_some() && !interrupted {
                    let block: Vec<CircularLayout> = all.by_ref().take(BLOCK).collect();
                    let f = |l: &CircularLayout| {
                        let outcome = search_layout(g, l, strategy, Target::Below(&shared), false, deadline);
                        if let Some((v, _)) = &outcome.best {
                            shared.fetch_min(*v, Ordering::Relaxed);
                        }
                        outcome
                    };
                    for (layout, outcome) in block.iter().zip(executor.map_layouts(&block, &f)) {
                        interrupted |= outcome.interrupted;
                        if let Some((value, arcs)) = outcome.best {
                            if value < best.0 {
                                best = (value, CircleWitness { layout: layout.clone(), arcs });
                            }
                        }
                    }
                    if best.0 <= floor {
                        break;
                    }
                }
            }
            if interrupted {
                return finish(best, true);
            }

            let optimum = best.0;
            let mut all = layouts(n).peekable();
            let batch = executor.batch_size().max(1);
            while all.peek().is_some() {
                let block: Vec<CircularLayout> = all.by_ref().take(batch).collect();
                let f = |l: &CircularLayout| search_layout(g, l, strategy, Target::AtMost(optimum), true, deadline);
                let outcomes = executor.map_layouts(&block, &f);
                for (layout, outcome) in block.iter().zip(outcomes) {
                    if outcome.interrupted {
                        return finish(best, false);
                    }
                    if let Some((value, arcs)) = outcome.best {
                        return finish((value, CircleWitness { layout: layout.clone(), arcs }), false);
                    }
                }
            }
            finish(best, false)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::NoDeadline;

    fn short(g: &SimpleGraph, l: &CircularLayout) -> ArcAssignment {
        shortest_arcs(g, l)
    }

    #[test]
    fn evaluate_examples() {
        let k3 = SimpleGraph::complete(3).unwrap();
        let l = CircularLayout::natural(3);
        assert_eq!(evaluate(&k3, &l, &short(&k3, &l)).unwrap().max_fiber, 1);

        let k5 = SimpleGraph::complete(5).unwrap();
        let l = CircularLayout::natural(5);
        let p = evaluate(&k5, &l, &short(&k5, &l)).unwrap();
        assert_eq!(p.max_fiber, 3);
        assert_eq!(p.gap_counts, vec![3; 5]);
        assert_eq!(p.gap_counts.iter().sum::<usize>(), 15);

        let point = SimpleGraph::new(1, []).unwrap();
        let p = evaluate(&point, &CircularLayout::natural(1), &ArcAssignment::new(vec![])).unwrap();
        assert_eq!(p.vertex_counts, vec![1]);
        assert_eq!(p.max_fiber, 1);
    }

    #[test]
    fn evaluate_rejects_mismatched_inputs() {
        let k3 = SimpleGraph::complete(3).unwrap();
        assert!(matches!(
            evaluate(&k3, &CircularLayout::natural(3), &ArcAssignment::new(vec![ArcDirection::Cw])),
            Err(GraphError::BadArcs { expected: 3, got: 1 })
        ));
        assert!(evaluate(&k3, &CircularLayout::natural(4), &short(&k3, &CircularLayout::natural(3))).is_err());
    }

    #[test]
    fn layout_normalization() {
        let a = CircularLayout::new(vec![2, 0, 1]).unwrap();
        let b = CircularLayout::new(vec![0, 1, 2]).unwrap();
        assert_eq!(a, b);
        assert!(CircularLayout::new(vec![0, 0, 1]).is_err());
        assert_eq!(layouts(5).count(), 12);
        assert_eq!(layouts(7).count(), 360);
        assert_eq!(layouts(2).count(), 1);
        assert_eq!(layouts(1).count(), 1);
        assert!(layouts(6).all(|l| l.reflected() != l || l.len() < 3));
    }

    #[test]
    fn pigeonhole_examples() {
        assert_eq!(pigeonhole_lower_bound(&SimpleGraph::complete(5).unwrap()), 2);
        assert_eq!(pigeonhole_lower_bound(&SimpleGraph::complete(7).unwrap()), 3);
        assert_eq!(pigeonhole_lower_bound(&SimpleGraph::new(4, []).unwrap()), 1);
    }

    #[test]
    fn complete_graphs() {
        for (n, expected) in [(3, 1), (4, 3), (5, 3)] {
            let g = SimpleGraph::complete(n).unwrap();
            for strategy in [Strategy::Exhaustive, Strategy::BranchAndBound] {
                let s = solve_exact(&g, strategy, &NoDeadline);
                assert_eq!(s.value, count(expected), "K_{n} {strategy:?}");
                assert_eq!(s.certificate, Certificate::Exact);
                let w = s.witness.unwrap();
                assert_eq!(evaluate(&g, &w.layout, &w.arcs).unwrap().max_fiber, expected);
            }
        }
    }

    #[test]
    fn small_special_graphs() {
        let single = SimpleGraph::new(1, []).unwrap();
        assert_eq!(solve_exact(&single, Strategy::BranchAndBound, &NoDeadline).value, MultValue::count(1));
        let cycle_and_point = SimpleGraph::new(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(solve_exact(&cycle_and_point, Strategy::Exhaustive, &NoDeadline).value, MultValue::count(2));
        let star = SimpleGraph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(solve_exact(&star, Strategy::BranchAndBound, &NoDeadline).value, MultValue::count(2));
        let two_triangles = SimpleGraph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(solve_exact(&two_triangles, Strategy::BranchAndBound, &NoDeadline).value, MultValue::count(2));
    }

    struct Expired;
    impl Deadline for Expired {
        fn expired(&self) -> bool {
            true
        }
    }

    #[test]
    fn expired_deadline_gives_upper_bound() {
        let k9 = SimpleGraph::complete(9).unwrap();
        let s = solve_exact(&k9, Strategy::BranchAndBound, &Expired);
        assert_eq!(s.certificate, Certificate::UpperBound);
        let w = s.witness.unwrap();
        assert_eq!(count(evaluate(&k9, &w.layout, &w.arcs).unwrap().max_fiber), s.value);
        assert!(s.value >= MultValue::count(10));
    }
}
