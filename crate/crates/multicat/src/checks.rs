//! Desk-scale property suites behind `multicat check`.

use std::sync::Arc;

use multicat_core::finset::{all_maps, finset_multiplicity, FinMap, FinSets, SetSize};
use multicat_core::graph::{betti_numbers, evaluate, pigeonhole_lower_bound, solve_exact, SimpleGraph, Strategy};
use multicat_core::group::{enumerate_homs, group_multiplicities, small_groups, FiniteGroup, GroupCategory, GroupHom};
use multicat_core::knot::{multiplicity_index_bounds, KnotRecord};
use multicat_core::module::{rank_floors, torsion_modules, HomSpace, ModuleCategory, RankMeasure, ZModuleHom};
use multicat_core::{
    check_multiplicity_axioms, check_pseudo_distance, AxiomReport, Category, Family, MultValue, NoDeadline, Search,
    Violation, ViolationKind,
};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    All,
    Finset,
    Group,
    Module,
    Graph,
    Knot,
}

/// Deliberate corruptions used to prove the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Identities are measured as 2.
    Identity,
    /// Only maps into a one-point set are measured; all others count as 1.
    Composition,
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub scope: Scope,
    pub max_order: usize,
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub objects: usize,
    pub pairs: usize,
    pub checks: usize,
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    fn new(suite: &'static str, objects: usize, pairs: usize, report: AxiomReport) -> Self {
        SuiteReport { suite, objects, pairs, checks: report.checks, violations: report.violations }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

pub fn run_checks(opts: &CheckOptions) -> CheckReport {
    let wanted = |s: Scope| opts.scope == Scope::All || opts.scope == s;
    let mut suites = Vec::new();
    if wanted(Scope::Finset) {
        suites.push(finset_suite(opts.fault));
    }
    if wanted(Scope::Group) {
        suites.push(group_suite(opts.max_order));
    }
    if wanted(Scope::Module) {
        suites.push(module_suite(opts.max_order as u64));
    }
    if wanted(Scope::Graph) {
        suites.push(graph_suite());
    }
    if wanted(Scope::Knot) {
        suites.push(knot_suite());
    }
    CheckReport { passed: suites.iter().all(|s| s.violations.is_empty()), suites }
}

fn violation(report: &mut AxiomReport, kind: ViolationKind, detail: String) {
    report.violations.push(Violation { kind, detail });
}

struct Faulty {
    inner: FinSets,
    fault: Fault,
}

impl Category for Faulty {
    type Object = SetSize;
    type Morphism = FinMap;

    fn family(&self) -> Family {
        Family::Count
    }

    fn identity(&self, x: &SetSize) -> FinMap {
        self.inner.identity(x)
    }

    fn compose(&self, f: &FinMap, g: &FinMap) -> Option<FinMap> {
        self.inner.compose(f, g)
    }

    fn multiplicity(&self, f: &FinMap) -> MultValue {
        match self.fault {
            Fault::Identity if f.images().iter().enumerate().all(|(i, &y)| i == y) => MultValue::count(2),
            Fault::Composition if f.codomain() != 1 => MultValue::count(1),
            _ => self.inner.multiplicity(f),
        }
    }

    fn search<'a>(&'a self, x: &'a SetSize, y: &'a SetSize) -> Search<'a, FinMap> {
        Search::exhaustive(all_maps(*x, *y).map(move |f| {
            let m = self.multiplicity(&f);
            (f, m)
        }))
    }
}

fn all_triples(n: usize) -> Vec<(usize, usize, usize)> {
    (0..n).flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c)))).collect()
}

fn finset_suite(fault: Option<Fault>) -> SuiteReport {
    let sizes: Vec<SetSize> = (1..=4).map(|n| SetSize::new(n).expect("positive")).collect();
    let mut pairs = Vec::new();
    for x in &sizes {
        for y in &sizes {
            for z in &sizes {
                for f in all_maps(*x, *y).step_by(3) {
                    for g in all_maps(*y, *z).step_by(5) {
                        pairs.push((f.clone(), g));
                    }
                }
            }
        }
    }
    let mut report = match fault {
        None => check_multiplicity_axioms(&FinSets::exhaustive(), &sizes, &pairs),
        Some(fault) => check_multiplicity_axioms(&Faulty { inner: FinSets::exhaustive(), fault }, &sizes, &pairs),
    };
    let metric = match fault {
        None => check_pseudo_distance(&FinSets::exhaustive(), &sizes, &all_triples(sizes.len())),
        Some(fault) => {
            check_pseudo_distance(&Faulty { inner: FinSets::exhaustive(), fault }, &sizes, &all_triples(sizes.len()))
        }
    };
    match metric {
        Ok(r) => report.merge(r),
        Err(e) => violation(&mut report, ViolationKind::Triangle, e.to_string()),
    }
    for x in 1..=5 {
        for y in 1..=5 {
            report.checks += 1;
            let (xs, ys) = (SetSize::new(x).expect("positive"), SetSize::new(y).expect("positive"));
            let brute = all_maps(xs, ys).map(|f| f.max_fiber()).min().expect("maps exist");
            let closed = finset_multiplicity(x, y).expect("positive").value;
            if closed != MultValue::count(brute as u64) {
                violation(&mut report, ViolationKind::Identity, format!("m({x}:{y}) = {closed}, brute force {brute}"));
            }
        }
    }
    SuiteReport::new("finset", sizes.len(), pairs.len(), report)
}

fn sample_homs(g: &Arc<FiniteGroup>, h: &Arc<FiniteGroup>, take: usize) -> Vec<GroupHom> {
    enumerate_homs(g, h).take(take).collect()
}

fn group_suite(max_order: usize) -> SuiteReport {
    let groups: Vec<Arc<FiniteGroup>> = small_groups(max_order).into_iter().map(|(_, g)| Arc::new(g)).collect();
    let n = groups.len();
    let mut report = AxiomReport::default();

    let mut pairs = Vec::new();
    for a in &groups {
        for b in &groups {
            let fs = sample_homs(a, b, 3);
            for c in &groups {
                for g in sample_homs(b, c, 3) {
                    pairs.extend(fs.iter().map(|f| (f.clone(), g.clone())));
                }
            }
        }
    }
    for inst in [GroupCategory::kernel(), GroupCategory::cokernel()] {
        report.merge(check_multiplicity_axioms(&inst, &groups, &pairs));
        match check_pseudo_distance(&inst, &groups, &all_triples(n)) {
            Ok(r) => report.merge(r),
            Err(e) => violation(&mut report, ViolationKind::Triangle, e.to_string()),
        }
    }

    // d_ker = d_coker, and the counting identities on every hom.
    let per_pair: Vec<AxiomReport> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (&groups[k / n], &groups[k % n]);
            let mut r = AxiomReport::default();
            let there = group_multiplicities(a, b);
            let back = group_multiplicities(b, a);
            r.checks += 1;
            let ker = there.m_ker.value.as_count().unwrap_or(0) * back.m_ker.value.as_count().unwrap_or(0);
            let coker = there.m_coker.value.as_count().unwrap_or(0) * back.m_coker.value.as_count().unwrap_or(0);
            if ker != coker {
                violation(&mut r, ViolationKind::Symmetry, format!("pair {k}: d_ker product {ker}, d_coker {coker}"));
            }
            for f in enumerate_homs(a, b) {
                r.checks += 1;
                let (kernel, image) = (f.kernel().len(), f.image_subgroup().len());
                let coker = f.cokernel_multiplicity().as_count().unwrap_or(0) as usize;
                if kernel * image != a.order() || kernel * b.order() != a.order() * coker {
                    violation(
                        &mut r,
                        ViolationKind::Identity,
                        format!("hom {:?}: |Ker| {kernel}, |Im| {image}, |Coker| {coker}", f.image()),
                    );
                }
            }
            r
        })
        .collect();
    for r in per_pair {
        report.merge(r);
    }
    SuiteReport::new("group", n, n * n, report)
}

fn module_suite(max_order: u64) -> SuiteReport {
    let modules = torsion_modules(max_order);
    let n = modules.len();
    let mut report = AxiomReport::default();
    let sample = |m: &multicat_core::module::FgZModule, t: &multicat_core::module::FgZModule| -> Vec<ZModuleHom> {
        let space = HomSpace::new(m, t, 1);
        let len = space.len().expect("torsion hom sets are finite");
        let step = (len / 4).max(1);
        (0..len).step_by(step as usize).take(4).map(|i| space.hom_at(i)).collect()
    };
    let mut pairs = Vec::new();
    for a in &modules {
        for b in &modules {
            let fs = sample(a, b);
            for f in &fs {
                report.checks += 1;
                let (ker_floor, coker_floor) = rank_floors(a, b);
                if f.kernel_rank() < ker_floor || f.cokernel_rank() < coker_floor {
                    violation(&mut report, ViolationKind::Identity, format!("{a} -> {b}: rank below its floor"));
                }
            }
            for c in &modules {
                for g in sample(b, c) {
                    for f in &fs {
                        let h = f.then(&g).expect("composable");
                        report.checks += 1;
                        if h.kernel_rank() > f.kernel_rank() + g.kernel_rank()
                            || h.cokernel_rank() > f.cokernel_rank() + g.cokernel_rank()
                        {
                            violation(
                                &mut report,
                                ViolationKind::Submultiplicativity,
                                format!("{a} -> {b} -> {c}: composite rank exceeds the sum"),
                            );
                        }
                        pairs.push((f.clone(), g.clone()));
                    }
                }
            }
        }
    }
    for measure in [RankMeasure::Kernel, RankMeasure::Cokernel] {
        let inst = ModuleCategory { measure, bound: 1 };
        report.merge(check_multiplicity_axioms(&inst, &modules, &pairs));
        match check_pseudo_distance(&inst, &modules, &all_triples(n)) {
            Ok(r) => report.merge(r),
            Err(e) => violation(&mut report, ViolationKind::Triangle, e.to_string()),
        }
    }
    SuiteReport::new("module", n, n * n, report)
}

fn small_graphs(max_vertices: usize) -> Vec<SimpleGraph> {
    let mut out = Vec::new();
    for v in 1..=max_vertices {
        let slots: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
        for mask in 0u32..1 << slots.len() {
            let edges = slots.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            out.push(SimpleGraph::new(v, edges).expect("valid edges"));
        }
    }
    out
}

fn graph_suite() -> SuiteReport {
    let graphs = small_graphs(4);
    let mut report = AxiomReport::default();
    for (i, g) in graphs.iter().enumerate() {
        report.checks += 1;
        let ex = solve_exact(g, Strategy::Exhaustive, &NoDeadline);
        let bb = solve_exact(g, Strategy::BranchAndBound, &NoDeadline);
        if ex != bb {
            violation(&mut report, ViolationKind::Identity, format!("graph #{i}: strategies disagree"));
        }
        let w = ex.witness.as_ref().expect("every graph maps to the circle");
        let profile = evaluate(g, &w.layout, &w.arcs).expect("witness fits the graph");
        if ex.value != MultValue::count(profile.max_fiber as u64)
            || (profile.max_fiber as usize) < pigeonhole_lower_bound(g)
        {
            violation(
                &mut report,
                ViolationKind::Identity,
                format!("graph #{i}: witness does not reproduce the value"),
            );
        }
        let b1 = betti_numbers(g).1;
        for k in 0..g.edge_count() {
            report.checks += 1;
            if betti_numbers(&g.edge_subgraph(|e| e != k)).1 > b1 {
                violation(
                    &mut report,
                    ViolationKind::Identity,
                    format!("graph #{i}: subgraph has larger first Betti number"),
                );
            }
        }
    }
    SuiteReport::new("graph", graphs.len(), 0, report)
}

fn knot_suite() -> SuiteReport {
    let mut report = AxiomReport::default();
    let base = KnotRecord::default();
    let cases = [
        (KnotRecord { is_trivial: Some(true), ..base.clone() }, Some(1)),
        (KnotRecord { torus_2p: Some(3), ..base.clone() }, Some(2)),
        (
            KnotRecord { braid_index: Some(3), is_torus_2p: Some(false), is_trivial: Some(false), ..base.clone() },
            Some(3),
        ),
        (KnotRecord { is_montesinos: Some(true), trunk: Some(8), ..base.clone() }, Some(4)),
    ];
    for (rec, want) in &cases {
        report.checks += 1;
        match multiplicity_index_bounds(rec) {
            Ok(b) if b.exact == *want => {}
            other => violation(&mut report, ViolationKind::Identity, format!("{rec:?}: got {other:?}")),
        }
    }
    for trunk in 2..=12u64 {
        for braid in 1..=6u64 {
            let loose = KnotRecord { trunk: Some(trunk), ..base.clone() };
            let tight = KnotRecord { braid_index: Some(braid), ..loose.clone() };
            report.checks += 1;
            if let (Ok(a), Ok(b)) = (multiplicity_index_bounds(&loose), multiplicity_index_bounds(&tight)) {
                if !b.is_within(&a) {
                    violation(&mut report, ViolationKind::Identity, format!("{tight:?} widened {loose:?}"));
                }
            }
        }
    }
    SuiteReport::new("knot", cases.len(), 0, report)
}
