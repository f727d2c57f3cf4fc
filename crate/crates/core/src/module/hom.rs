use alloc::vec::Vec;
use core::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use super::snf::{smith_normal_form, IntMatrix};
use super::{min_generators, FgZModule};
use crate::category::{Category, CertifiedDistance, Search};
use crate::value::{Certificate, DistValue, Family, MultValue, WitnessedMultiplicity};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModuleHomError {
    #[error("matrix is {got_rows}x{got_cols}, expected {rows}x{cols}")]
    Shape { rows: usize, cols: usize, got_rows: usize, got_cols: usize },
    #[error("torsion generator {col} maps to a nonzero free coordinate {row}")]
    TorsionToFree { row: usize, col: usize },
    #[error("entry ({row}, {col}) does not respect the orders of the torsion generators")]
    NotWellDefined { row: usize, col: usize },
}

/// A homomorphism `M -> N`, stored as an integer matrix on presentation
/// generators.
///
/// Column `j` holds the image of generator `j` of `M` (free generators first,
/// then one per invariant factor) in the generators of `N`. Rows for torsion
/// generators of `N` are reduced into `[0, e)`. Blocks: `A` free→free, `C`
/// free→torsion, `D` torsion→torsion; the torsion→free block is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZModuleHom {
    source: FgZModule,
    target: FgZModule,
    matrix: IntMatrix,
}

/// Relations of `M`: one column `dᵢ · (generator r + i)` per invariant factor.
fn relations(m: &FgZModule) -> IntMatrix {
    let (r, k) = (m.free_rank(), m.invariant_factors().len());
    let mut rel = IntMatrix::zero(r + k, k);
    for (i, d) in m.invariant_factors().iter().enumerate() {
        rel.set(r + i, i, d.clone());
    }
    rel
}

/// The module `ℤ^rows / col(P)`.
fn presented_module(p: &IntMatrix) -> FgZModule {
    let snf = smith_normal_form(p);
    let diag = snf.diagonal();
    let rank = snf.rank();
    let torsion = diag.into_iter().take(rank).filter(|d| !d.is_one());
    FgZModule::from_cyclic(p.rows() - rank, torsion).expect("Smith diagonal is a positive chain")
}

impl ZModuleHom {
    /// Validates a lifted matrix and reduces its torsion rows.
    pub fn from_matrix(source: FgZModule, target: FgZModule, matrix: IntMatrix) -> Result<Self, ModuleHomError> {
        let (r, s) = (source.free_rank(), target.free_rank());
        let (rows, cols) = (target.generator_count(), source.generator_count());
        if matrix.rows() != rows || matrix.cols() != cols {
            return Err(ModuleHomError::Shape { rows, cols, got_rows: matrix.rows(), got_cols: matrix.cols() });
        }
        let mut matrix = matrix;
        for row in 0..s {
            if let Some(col) = (r..cols).find(|&col| !matrix.get(row, col).is_zero()) {
                return Err(ModuleHomError::TorsionToFree { row, col });
            }
        }
        for j in 0..rows - s {
            for col in 0..cols {
                let v = target.reduce(j, matrix.get(s + j, col));
                if col >= r {
                    let d = &source.invariant_factors()[col - r];
                    if !(d * &v).is_multiple_of(&target.invariant_factors()[j]) {
                        return Err(ModuleHomError::NotWellDefined { row: s + j, col });
                    }
                }
                matrix.set(s + j, col, v);
            }
        }
        Ok(ZModuleHom { source, target, matrix })
    }

    /// Assembles the hom from its `A` (`s×r`), `C` (`l×r`) and `D` (`l×k`) blocks.
    pub fn from_blocks(
        source: FgZModule,
        target: FgZModule,
        a: &IntMatrix,
        c: &IntMatrix,
        d: &IntMatrix,
    ) -> Result<Self, ModuleHomError> {
        let (r, k) = (source.free_rank(), source.invariant_factors().len());
        let (s, l) = (target.free_rank(), target.invariant_factors().len());
        for (m, rows, cols) in [(a, s, r), (c, l, r), (d, l, k)] {
            if m.rows() != rows || m.cols() != cols {
                return Err(ModuleHomError::Shape { rows, cols, got_rows: m.rows(), got_cols: m.cols() });
            }
        }
        let mut f = IntMatrix::zero(s + l, r + k);
        for i in 0..s {
            for j in 0..r {
                f.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..l {
            for j in 0..r {
                f.set(s + i, j, c.get(i, j).clone());
            }
            for j in 0..k {
                f.set(s + i, r + j, d.get(i, j).clone());
            }
        }
        ZModuleHom::from_matrix(source, target, f)
    }

    pub fn identity(m: &FgZModule) -> Self {
        ZModuleHom { source: m.clone(), target: m.clone(), matrix: IntMatrix::identity(m.generator_count()) }
    }

    pub fn zero(source: &FgZModule, target: &FgZModule) -> Self {
        let matrix = IntMatrix::zero(target.generator_count(), source.generator_count());
        ZModuleHom { source: source.clone(), target: target.clone(), matrix }
    }

    /// Free generator `i` of `M` to free generator `i` of `N` for `i < min(r, s)`,
    /// everything else to zero.
    pub fn free_diagonal(source: &FgZModule, target: &FgZModule) -> Self {
        let mut f = ZModuleHom::zero(source, target);
        for i in 0..source.free_rank().min(target.free_rank()) {
            f.matrix.set(i, i, BigInt::one());
        }
        f
    }

    pub fn source(&self) -> &FgZModule {
        &self.source
    }

    pub fn target(&self) -> &FgZModule {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn block_a(&self) -> IntMatrix {
        self.matrix.block(0..self.target.free_rank(), 0..self.source.free_rank())
    }

    pub fn block_c(&self) -> IntMatrix {
        self.matrix.block(self.target.free_rank()..self.matrix.rows(), 0..self.source.free_rank())
    }

    pub fn block_d(&self) -> IntMatrix {
        self.matrix.block(self.target.free_rank()..self.matrix.rows(), self.source.free_rank()..self.matrix.cols())
    }

    /// `g ∘ self`, if `self` lands where `g` starts.
    pub fn then(&self, g: &ZModuleHom) -> Option<ZModuleHom> {
        if self.target != g.source {
            return None;
        }
        let product = g.matrix.mul(&self.matrix);
        ZModuleHom::from_matrix(self.source.clone(), g.target.clone(), product).ok()
    }

    /// `N / f(M)`: the module presented by `[F | R_N]`.
    pub fn cokernel(&self) -> FgZModule {
        presented_module(&self.matrix.hcat(&relations(&self.target)))
    }

    /// `Ker f`.
    ///
    /// The lifts `x ∈ ℤ^(r+k)` of kernel elements are the projections of the
    /// integer kernel of `[F | R_N]`. In a basis of that lattice read off a
    /// Smith form, the relations of `M` give a presentation of the kernel.
    pub fn kernel(&self) -> FgZModule {
        let n_gens = self.source.generator_count();
        let q = self.matrix.hcat(&relations(&self.target));
        let snf_q = smith_normal_form(&q);
        let rank_q = snf_q.rank();
        let lifts = snf_q.v.block(0..n_gens, rank_q..q.cols());

        let snf_l = smith_normal_form(&lifts);
        let t = snf_l.rank();
        let diag = snf_l.diagonal();
        let coords = snf_l.u.mul(&relations(&self.source));
        let mut x = IntMatrix::zero(t, coords.cols());
        for i in 0..t {
            for c in 0..coords.cols() {
                let (quot, rem) = coords.get(i, c).div_rem(&diag[i]);
                debug_assert!(rem.is_zero(), "relations of the source lie in the lift lattice");
                x.set(i, c, quot);
            }
        }
        presented_module(&x)
    }

    /// `r(Ker f)`.
    pub fn kernel_rank(&self) -> usize {
        min_generators(&self.kernel())
    }

    /// `r(Coker f)`.
    pub fn cokernel_rank(&self) -> usize {
        min_generators(&self.cokernel())
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_zero()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().is_zero()
    }
}

struct Entry<'a>(&'a BigInt);

impl Serialize for Entry<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => serializer.serialize_i64(v),
            None => serializer.collect_str(self.0),
        }
    }
}

struct Rows<'a>(&'a IntMatrix);

impl Serialize for Rows<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.rows()))?;
        for row in self.0.row_iter() {
            seq.serialize_element(&row.iter().map(Entry).collect::<Vec<_>>())?;
        }
        seq.end()
    }
}

/// `{"A": [[..]], "C": [[..]], "D": [[..]]}`; entries outside `i64` become strings.
impl Serialize for ZModuleHom {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ZModuleHom", 3)?;
        s.serialize_field("A", &Rows(&self.block_a()))?;
        s.serialize_field("C", &Rows(&self.block_c()))?;
        s.serialize_field("D", &Rows(&self.block_d()))?;
        s.end()
    }
}

#[derive(Debug, Clone)]
enum Digit {
    /// Free-block entry in `[-B, B]`, enumerated `0, 1, -1, 2, -2, …`.
    Free { row: usize, col: usize, bound: u64 },
    /// Torsion-row entry `step · digit` with `digit < count`.
    Residue { row: usize, col: usize, count: BigInt, step: BigInt },
}

impl Digit {
    fn radix(&self) -> Option<u128> {
        match self {
            Digit::Free { bound, .. } => (u128::from(*bound)).checked_mul(2).map(|x| x + 1),
            Digit::Residue { count, .. } => count.to_u128(),
        }
    }
}

/// The candidate homomorphisms `M -> N` searched for rank minima.
///
/// Torsion-row entries run over every well-defined residue; free-block entries
/// run over `[-B, B]`. When `M` has no free part or `N` has none, this is the
/// whole (finite) hom set. Candidates are numbered in mixed radix with the
/// last digit fastest.
#[derive(Debug, Clone)]
pub struct HomSpace {
    source: FgZModule,
    target: FgZModule,
    digits: Vec<Digit>,
    len: Option<u128>,
}

impl HomSpace {
    pub fn new(source: &FgZModule, target: &FgZModule, bound: u64) -> Self {
        let (r, k) = (source.free_rank(), source.invariant_factors().len());
        let (s, l) = (target.free_rank(), target.invariant_factors().len());
        let mut digits = Vec::new();
        for row in 0..s {
            for col in 0..r {
                digits.push(Digit::Free { row, col, bound });
            }
        }
        for j in 0..l {
            let e = &target.invariant_factors()[j];
            for col in 0..r {
                digits.push(Digit::Residue { row: s + j, col, count: e.clone(), step: BigInt::one() });
            }
            for i in 0..k {
                let g = source.invariant_factors()[i].gcd(e);
                digits.push(Digit::Residue { row: s + j, col: r + i, step: e / &g, count: g });
            }
        }
        let len = digits.iter().try_fold(1u128, |acc, d| d.radix().and_then(|x| acc.checked_mul(x)));
        HomSpace { source: source.clone(), target: target.clone(), digits, len }
    }

    /// Number of candidates; `None` if it does not fit in `u128`.
    pub fn len(&self) -> Option<u128> {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == Some(0)
    }

    /// Whether the candidates are the entire hom set.
    pub fn is_complete(&self) -> bool {
        self.len.is_some() && !self.digits.iter().any(|d| matches!(d, Digit::Free { .. }))
    }

    pub fn source(&self) -> &FgZModule {
        &self.source
    }

    pub fn target(&self) -> &FgZModule {
        &self.target
    }

    /// Candidate number `index`.
    pub fn hom_at(&self, mut index: u128) -> ZModuleHom {
        let mut matrix = IntMatrix::zero(self.target.generator_count(), self.source.generator_count());
        for digit in self.digits.iter().rev() {
            let radix = digit.radix().unwrap_or(u128::MAX);
            let x = index % radix;
            index /= radix;
            match digit {
                Digit::Free { row, col, .. } => {
                    let half = (x as i128 + 1) / 2;
                    let v = if x % 2 == 1 { half } else { -half };
                    matrix.set(*row, *col, BigInt::from(v));
                }
                Digit::Residue { row, col, step, .. } => matrix.set(*row, *col, step * BigInt::from(x)),
            }
        }
        ZModuleHom { source: self.source.clone(), target: self.target.clone(), matrix }
    }
}

/// Default free-block bound: the product of the distinct primes dividing any
/// invariant factor of either module, capped at 64 (at least 1).
pub fn default_bound(m: &FgZModule, n: &FgZModule) -> u64 {
    let mut primes: Vec<u64> = Vec::new();
    for d in m.invariant_factors().iter().chain(n.invariant_factors()) {
        let mut x = d.clone();
        let mut p = 2u64;
        while !x.is_one() && p <= 64 {
            if (&x % p).is_zero() {
                if !primes.contains(&p) {
                    primes.push(p);
                }
                while (&x % p).is_zero() {
                    x /= p;
                }
            }
            p += 1;
        }
        if !x.is_one() {
            // A prime factor above 64 pushes the product past the cap.
            return 64;
        }
    }
    primes.iter().try_fold(1u64, |acc, &p| acc.checked_mul(p)).map_or(64, |b| b.clamp(1, 64))
}

/// Candidates evaluated before a non-exhaustive search gives up.
pub const DEFAULT_CANDIDATE_LIMIT: u128 = 1 << 20;

/// Best ranks found over an index range, as `(rank, index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RankSearch {
    pub kernel: Option<(usize, u128)>,
    pub cokernel: Option<(usize, u128)>,
    /// Both lower bounds were reached and the scan stopped early.
    pub reached_floors: bool,
}

impl RankSearch {
    /// Combines results of consecutive ranges, preferring lower rank then lower index.
    pub fn merge(self, other: RankSearch) -> RankSearch {
        let best = |a: Option<(usize, u128)>, b: Option<(usize, u128)>| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        RankSearch {
            kernel: best(self.kernel, other.kernel),
            cokernel: best(self.cokernel, other.cokernel),
            reached_floors: self.reached_floors || other.reached_floors,
        }
    }
}

/// `(max(r(M) - r(N), 0), max(r(N) - r(M), 0))`, the lower bounds on
/// `r(Ker f)` and `r(Coker f)`.
pub fn rank_floors(m: &FgZModule, n: &FgZModule) -> (usize, usize) {
    let (rm, rn) = (min_generators(m), min_generators(n));
    (rm.saturating_sub(rn), rn.saturating_sub(rm))
}

/// Scans `range` for the smallest kernel and cokernel ranks, stopping once
/// both lower bounds are met.
pub fn search_ranks(space: &HomSpace, range: Range<u128>) -> RankSearch {
    let (ker_floor, coker_floor) = rank_floors(&space.source, &space.target);
    let mut out = RankSearch::default();
    for index in range {
        let f = space.hom_at(index);
        let ker_done = out.kernel.is_some_and(|(v, _)| v <= ker_floor);
        let coker_done = out.cokernel.is_some_and(|(v, _)| v <= coker_floor);
        if !ker_done {
            let v = f.kernel_rank();
            if out.kernel.is_none_or(|(b, _)| v < b) {
                out.kernel = Some((v, index));
            }
        }
        if !coker_done {
            let v = f.cokernel_rank();
            if out.cokernel.is_none_or(|(b, _)| v < b) {
                out.cokernel = Some((v, index));
            }
        }
        if out.kernel.is_some_and(|(v, _)| v <= ker_floor) && out.cokernel.is_some_and(|(v, _)| v <= coker_floor) {
            out.reached_floors = true;
            break;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankMultiplicities {
    pub m_rker: WitnessedMultiplicity<ZModuleHom>,
    pub m_rcoker: WitnessedMultiplicity<ZModuleHom>,
}

/// Turns a finished search into certified multiplicities.
pub fn finish_rank_search(space: &HomSpace, found: RankSearch, scanned_all: bool) -> RankMultiplicities {
    let (ker_floor, coker_floor) = rank_floors(&space.source, &space.target);
    let complete = space.is_complete() && scanned_all;
    let wrap = |best: Option<(usize, u128)>, floor: usize| {
        let (rank, index) = best.expect("the zero map is candidate 0");
        let f = space.hom_at(index);
        WitnessedMultiplicity {
            value: MultValue::Exp(rank as u32),
            witness: Some(f),
            certificate: if complete || rank <= floor { Certificate::Exact } else { Certificate::UpperBound },
        }
    };
    RankMultiplicities { m_rker: wrap(found.kernel, ker_floor), m_rcoker: wrap(found.cokernel, coker_floor) }
}

/// `m_r(Ker)(M:N)` and `m_r(Coker)(M:N)`.
///
/// Free modules use the closed form `e^max(r(M)-r(N),0)` (and symmetrically)
/// with a diagonal witness. Otherwise candidates from [`HomSpace`] are
/// scanned; the result is exact when the hom set was covered completely or the
/// value meets its lower bound.
pub fn rank_multiplicities(m: &FgZModule, n: &FgZModule, bound: u64) -> RankMultiplicities {
    rank_multiplicities_limited(m, n, bound, DEFAULT_CANDIDATE_LIMIT)
}

pub fn rank_multiplicities_limited(m: &FgZModule, n: &FgZModule, bound: u64, limit: u128) -> RankMultiplicities {
    if m.is_free() && n.is_free() {
        let (ker, coker) = rank_floors(m, n);
        let f = ZModuleHom::free_diagonal(m, n);
        let exact = |rank: usize| WitnessedMultiplicity {
            value: MultValue::Exp(rank as u32),
            witness: Some(f.clone()),
            certificate: Certificate::Exact,
        };
        return RankMultiplicities { m_rker: exact(ker), m_rcoker: exact(coker) };
    }
    let space = HomSpace::new(m, n, bound.max(1));
    let end = space.len().map_or(limit, |len| if space.is_complete() { len } else { len.min(limit) });
    let found = search_ranks(&space, 0..end);
    let scanned_all = found.reached_floors || space.len() == Some(end);
    finish_rank_search(&space, found, scanned_all)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankDistances {
    pub d_rker: CertifiedDistance,
    pub d_rcoker: CertifiedDistance,
}

/// `ln(m(M:N) m(N:M))` for both rank multiplicities.
pub fn rank_distances(m: &FgZModule, n: &FgZModule, bound: u64) -> RankDistances {
    let there = rank_multiplicities(m, n, bound);
    let back = rank_multiplicities(n, m, bound);
    let combine = |a: &WitnessedMultiplicity<ZModuleHom>, b: &WitnessedMultiplicity<ZModuleHom>| CertifiedDistance {
        distance: DistValue::from_pair(a.value, b.value).expect("exponents are small"),
        certificate: a.certificate.meet(b.certificate),
    };
    RankDistances { d_rker: combine(&there.m_rker, &back.m_rker), d_rcoker: combine(&there.m_rcoker, &back.m_rcoker) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMeasure {
    Kernel,
    Cokernel,
}

/// Finitely generated ℤ-modules measured by `e^r(Ker f)` or `e^r(Coker f)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModuleCategory {
    pub measure: RankMeasure,
    pub bound: u64,
}

impl Category for ModuleCategory {
    type Object = FgZModule;
    type Morphism = ZModuleHom;

    fn family(&self) -> Family {
        Family::Exp
    }

    fn identity(&self, x: &FgZModule) -> ZModuleHom {
        ZModuleHom::identity(x)
    }

    fn compose(&self, f: &ZModuleHom, g: &ZModuleHom) -> Option<ZModuleHom> {
        f.then(g)
    }

    fn multiplicity(&self, f: &ZModuleHom) -> MultValue {
        let rank = match self.measure {
            RankMeasure::Kernel => f.kernel_rank(),
            RankMeasure::Cokernel => f.cokernel_rank(),
        };
        MultValue::Exp(rank as u32)
    }

    fn search<'a>(&'a self, x: &'a FgZModule, y: &'a FgZModule) -> Search<'a, ZModuleHom> {
        if x.is_free() && y.is_free() {
            let f = ZModuleHom::free_diagonal(x, y);
            let m = self.multiplicity(&f);
            return Search::partial(core::iter::once((f, m)));
        }
        let space = HomSpace::new(x, y, self.bound.max(1));
        let complete = space.is_complete();
        let end = match space.len() {
            Some(len) if complete => len,
            len => len.unwrap_or(u128::MAX).min(DEFAULT_CANDIDATE_LIMIT),
        };
        let candidates = (0..end).map(move |i| {
            let f = space.hom_at(i);
            let m = self.multiplicity(&f);
            (f, m)
        });
        if complete {
            Search::exhaustive(candidates)
        } else {
            Search::partial(candidates)
        }
    }

    fn lower_bound(&self, x: &FgZModule, y: &FgZModule) -> Option<MultValue> {
        let (ker, coker) = rank_floors(x, y);
        Some(MultValue::Exp(match self.measure {
            RankMeasure::Kernel => ker,
            RankMeasure::Cokernel => coker,
        } as u32))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_module, torsion_modules};
    use super::*;
    use crate::category::{check_multiplicity_axioms, check_pseudo_distance};
    use alloc::collections::BTreeSet;
    use alloc::vec;

    fn module(s: &str) -> FgZModule {
        parse_module(s).unwrap()
    }

    fn hom(m: &str, n: &str, rows: &[Vec<i64>]) -> ZModuleHom {
        let (m, n) = (module(m), module(n));
        let cols = m.generator_count();
        ZModuleHom::from_matrix(m, n, IntMatrix::from_rows(cols, rows)).unwrap()
    }

    /// Isomorphism type of a finite abelian group from the sizes of its
    /// `p^a`-torsion subgroups, given a predicate "`p^a` kills element `x`".
    fn type_from_torsion_counts(order: u64, count_killed: impl Fn(u64) -> u64) -> FgZModule {
        let mut cyclic = Vec::new();
        let mut rest = order;
        let mut p = 2;
        while rest > 1 {
            if rest.is_multiple_of(p) {
                while rest.is_multiple_of(p) {
                    rest /= p;
                }
                // c[a] = log_p |K[p^a]|; factors of order >= p^a number c[a] - c[a-1].
                let log = |mut x: u64| {
                    let mut e = 0;
                    while x > 1 {
                        x /= p;
                        e += 1;
                    }
                    e
                };
                let mut prev = 0;
                let mut pa = p;
                let mut at_least = Vec::new();
                loop {
                    let c = log(count_killed(pa));
                    if c == prev {
                        break;
                    }
                    at_least.push(c - prev);
                    prev = c;
                    pa *= p;
                }
                for (a, w) in at_least.iter().enumerate() {
                    let next = at_least.get(a + 1).copied().unwrap_or(0);
                    for _ in 0..(w - next) {
                        cyclic.push(BigInt::from(p.pow(a as u32 + 1)));
                    }
                }
            }
            p += 1;
        }
        FgZModule::from_cyclic(0, cyclic).unwrap()
    }

    fn elements(factors: &[u64]) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &d in factors {
            out = out.into_iter().flat_map(|v| (0..d).map(move |x| [v.clone(), vec![x]].concat())).collect();
        }
        out
    }

    fn apply(f: &ZModuleHom, x: &[u64]) -> Vec<u64> {
        let e = f.target().small_factors().unwrap();
        (0..e.len())
            .map(|j| {
                let s: BigInt = (0..x.len()).map(|i| f.matrix().get(j, i) * BigInt::from(x[i])).sum();
                s.mod_floor(&BigInt::from(e[j])).to_u64().unwrap()
            })
            .collect()
    }

    fn mul(factors: &[u64], a: u64, x: &[u64]) -> Vec<u64> {
        x.iter().zip(factors).map(|(&v, &d)| (a * v) % d).collect()
    }

    /// Kernel and cokernel types by enumerating elements.
    fn element_oracle(f: &ZModuleHom) -> (FgZModule, FgZModule) {
        let (df, ef) = (f.source().small_factors().unwrap(), f.target().small_factors().unwrap());
        let zero_n = vec![0; ef.len()];
        let kernel: Vec<Vec<u64>> = elements(&df).into_iter().filter(|x| apply(f, x) == zero_n).collect();
        let ker = type_from_torsion_counts(kernel.len() as u64, |pa| {
            kernel.iter().filter(|x| mul(&df, pa, x).iter().all(|&v| v == 0)).count() as u64
        });
        let image: BTreeSet<Vec<u64>> = elements(&df).iter().map(|x| apply(f, x)).collect();
        let n_elems = elements(&ef);
        let coker_order = n_elems.len() as u64 / image.len() as u64;
        let coker = type_from_torsion_counts(coker_order, |pa| {
            let lifted = n_elems.iter().filter(|y| image.contains(&mul(&ef, pa, y))).count();
            (lifted / image.len()) as u64
        });
        (ker, coker)
    }

    #[test]
    fn kernel_and_cokernel_examples() {
        let id = ZModuleHom::identity(&module("Z^2 + Z/4"));
        assert_eq!(id.kernel(), FgZModule::zero());
        assert_eq!(id.cokernel(), FgZModule::zero());

        let f = hom("Z", "Z/2", &[vec![1]]);
        assert_eq!(f.kernel(), FgZModule::free(1));
        assert_eq!(f.cokernel(), FgZModule::zero());

        let f = hom("Z/4", "Z/4", &[vec![2]]);
        assert_eq!(f.kernel(), module("Z/2"));
        assert_eq!(f.cokernel(), module("Z/2"));
        assert_eq!(element_oracle(&f), (module("Z/2"), module("Z/2")));

        let f = hom("Z^2", "Z", &[vec![2, 4]]);
        assert_eq!(f.kernel(), FgZModule::free(1));
        assert_eq!(f.cokernel(), module("Z/2"));

        let f = ZModuleHom::zero(&module("Z/2"), &FgZModule::free(1));
        assert_eq!(f.kernel(), module("Z/2"));
        assert_eq!(f.cokernel(), FgZModule::free(1));

        // Z + Z/6 -> Z/4 + Z/12: (1, 0) ↦ (1, 3), (0, 1) ↦ (2, 2).
        let f = hom("Z + Z/6", "Z/4 + Z/12", &[vec![1, 2], vec![3, 2]]);
        assert_eq!(f.cokernel(), presented_module(&f.matrix().hcat(&relations(f.target()))));
        assert_eq!(f.kernel().free_rank(), 1);
    }

    #[test]
    fn validation() {
        let (m, n) = (module("Z/2"), module("Z/4"));
        assert_eq!(
            ZModuleHom::from_matrix(m.clone(), n.clone(), IntMatrix::from_rows(1, &[vec![1]])),
            Err(ModuleHomError::NotWellDefined { row: 0, col: 0 })
        );
        assert!(ZModuleHom::from_matrix(m.clone(), n, IntMatrix::from_rows(1, &[vec![6]])).is_ok());
        assert_eq!(
            ZModuleHom::from_matrix(m, FgZModule::free(1), IntMatrix::from_rows(1, &[vec![1]])),
            Err(ModuleHomError::TorsionToFree { row: 0, col: 0 })
        );
    }

    #[test]
    fn hom_space_counts_match_gcd_formula() {
        // |Hom(Z/a, Z/b)| = gcd(a, b).
        for (a, b) in [(2u64, 4u64), (4, 6), (3, 5), (12, 18)] {
            let space = HomSpace::new(&module(&alloc::format!("Z/{a}")), &module(&alloc::format!("Z/{b}")), 1);
            assert_eq!(space.len(), Some(u128::from(a.gcd(&b))));
            assert!(space.is_complete());
        }
        let space = HomSpace::new(&FgZModule::free(1), &FgZModule::free(1), 2);
        assert_eq!(space.len(), Some(5));
        assert!(!space.is_complete());
        let values: Vec<_> = (0..5).map(|i| space.hom_at(i).matrix().get(0, 0).clone()).collect();
        assert_eq!(values, [0, 1, -1, 2, -2].map(BigInt::from));
    }

    #[test]
    fn kernel_and_cokernel_match_element_oracle() {
        let corpus = torsion_modules(8);
        for m in &corpus {
            for n in &corpus {
                let space = HomSpace::new(m, n, 1);
                for i in 0..space.len().unwrap() {
                    let f = space.hom_at(i);
                    assert_eq!((f.kernel(), f.cokernel()), element_oracle(&f), "{m} -> {n} #{i}");
                }
            }
        }
    }

    fn triples_without_last(triples: &[(usize, usize, usize)], n: usize) -> Vec<(usize, usize, usize)> {
        triples.iter().copied().filter(|&(a, b, c)| a < n - 1 && b < n - 1 && c < n - 1).collect()
    }

    fn exp(n: u32) -> MultValue {
        MultValue::Exp(n)
    }

    #[test]
    fn rank_multiplicity_examples() {
        let r = rank_multiplicities(&FgZModule::free(3), &FgZModule::free(2), 1);
        assert_eq!((r.m_rker.value, r.m_rcoker.value), (exp(1), exp(0)));
        assert_eq!(r.m_rker.certificate, Certificate::Exact);

        let (z, z2) = (FgZModule::free(1), module("Z/2"));
        let r = rank_multiplicities(&z, &z2, default_bound(&z, &z2));
        assert_eq!((r.m_rker.value, r.m_rcoker.value), (exp(1), exp(0)));
        assert_eq!((r.m_rker.certificate, r.m_rcoker.certificate), (Certificate::Exact, Certificate::Exact));
        let r = rank_multiplicities(&z2, &z, default_bound(&z2, &z));
        assert_eq!((r.m_rker.value, r.m_rcoker.value), (exp(1), exp(1)));
        assert_eq!((r.m_rker.certificate, r.m_rcoker.certificate), (Certificate::Exact, Certificate::Exact));

        let d = rank_distances(&z, &z2, 2);
        assert_eq!((d.d_rker.distance.product, d.d_rcoker.distance.product), (exp(2), exp(1)));

        for n in 0..=4 {
            for m in 0..=4 {
                let d = rank_distances(&FgZModule::free(n), &FgZModule::free(m), 1);
                let expected = exp(n.abs_diff(m) as u32);
                assert_eq!((d.d_rker.distance.product, d.d_rcoker.distance.product), (expected, expected));
            }
        }
        let m = module("Z^2 + Z/6");
        let d = rank_distances(&m, &m, default_bound(&m, &m));
        assert!(d.d_rker.distance.is_zero() && d.d_rcoker.distance.is_zero());
    }

    #[test]
    fn torsion_search_matches_full_enumeration() {
        let (m, n) = (module("Z/2 + Z/4"), module("Z/8"));
        let r = rank_multiplicities(&m, &n, 1);
        let space = HomSpace::new(&m, &n, 1);
        let all: Vec<_> = (0..space.len().unwrap()).map(|i| space.hom_at(i)).collect();
        assert_eq!(all.len(), 8);
        let min_ker = all.iter().map(ZModuleHom::kernel_rank).min().unwrap();
        let min_coker = all.iter().map(ZModuleHom::cokernel_rank).min().unwrap();
        assert_eq!(r.m_rker.value, exp(min_ker as u32));
        assert_eq!(r.m_rcoker.value, exp(min_coker as u32));
        // Z/2 + Z/4 has exponent 4, so nothing maps onto Z/8.
        assert_eq!((min_ker, min_coker), (1, 1));
    }

    #[test]
    fn default_bounds() {
        assert_eq!(default_bound(&module("Z/12"), &module("Z + Z/5")), 30);
        assert_eq!(default_bound(&FgZModule::free(2), &FgZModule::free(1)), 1);
        assert_eq!(default_bound(&module("Z/2 + Z/6 + Z/30 + Z/210"), &module("Z/11")), 64);
        assert_eq!(default_bound(&module("Z/101"), &FgZModule::zero()), 64);
    }

    #[test]
    fn witness_json_shape() {
        let f = hom("Z + Z/2", "Z + Z/4", &[vec![3, 0], vec![1, 2]]);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"A":[[3]],"C":[[1]],"D":[[2]]}"#);
    }

    #[test]
    fn category_axioms_and_metric_on_small_corpus() {
        let corpus: Vec<FgZModule> =
            ["0", "Z", "Z^2", "Z/2", "Z/4", "Z/2 + Z/2", "Z + Z/2"].iter().map(|s| module(s)).collect();
        for measure in [RankMeasure::Kernel, RankMeasure::Cokernel] {
            let inst = ModuleCategory { measure, bound: 2 };
            let mut pairs = Vec::new();
            let torsion: Vec<_> = corpus.iter().filter(|m| m.is_torsion()).collect();
            for a in &torsion {
                for b in &torsion {
                    for c in &torsion {
                        let (s1, s2) = (HomSpace::new(a, b, 1), HomSpace::new(b, c, 1));
                        for i in 0..s1.len().unwrap() {
                            for j in 0..s2.len().unwrap() {
                                pairs.push((s1.hom_at(i), s2.hom_at(j)));
                            }
                        }
                    }
                }
            }
            let report = check_multiplicity_axioms(&inst, &corpus, &pairs);
            assert!(report.is_clean(), "{:?}", report.violations);
            let n = corpus.len();
            let triples: Vec<_> =
                (0..n).flat_map(|a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c)))).collect();
            // Z + Z/2 against Z^2 is only bounded from above; keep it out of the metric check.
            let report = check_pseudo_distance(&inst, &corpus[..n - 1], &triples_without_last(&triples, n)).unwrap();
            assert!(report.is_clean(), "{:?}", report.violations);
        }
    }
}
