//! Finite groups given by Cayley tables, their homomorphisms, and the
//! kernel/cokernel multiplicities.

mod hom;

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

pub use hom::{
    co_weakly_isomorphic, enumerate_homs, group_multiplicities, is_isomorphic, weakly_isomorphic, ForgetToSets,
    GroupCategory, GroupHom, GroupMeasure, GroupMultiplicities, HomError, HomIter,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error("a group needs at least one element")]
    Empty,
    #[error("table has {got} rows, expected {expected}")]
    RowCount { expected: usize, got: usize },
    #[error("row {row} has {got} entries, expected {expected}")]
    RowLength { row: usize, expected: usize, got: usize },
    #[error("entry ({row}, {col}) = {value} is not an element index below {order}")]
    EntryOutOfRange { row: usize, col: usize, value: usize, order: usize },
    #[error("no element acts as a two-sided identity")]
    NoIdentity,
    #[error("element {element} has no two-sided inverse")]
    NoInverse { element: usize },
    #[error("not associative: ({a} {b}) {c} = {left} but {a} ({b} {c}) = {right}")]
    NotAssociative { a: usize, b: usize, c: usize, left: usize, right: usize },
    #[error("invalid constructor parameter: {0}")]
    Parameter(String),
}

/// A finite group on `0..order` with identity `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverses: Vec<usize>,
    element_orders: Vec<usize>,
}

/// Checks the group axioms and renumbers the identity to `0`.
///
/// Errors refer to the indices of the input table.
pub fn validate_group(order: usize, rows: &[Vec<usize>]) -> Result<FiniteGroup, GroupError> {
    if order == 0 {
        return Err(GroupError::Empty);
    }
    if rows.len() != order {
        return Err(GroupError::RowCount { expected: order, got: rows.len() });
    }
    for (row, r) in rows.iter().enumerate() {
        if r.len() != order {
            return Err(GroupError::RowLength { row, expected: order, got: r.len() });
        }
        if let Some((col, &value)) = r.iter().enumerate().find(|(_, &v)| v >= order) {
            return Err(GroupError::EntryOutOfRange { row, col, value, order });
        }
    }
    let mul = |a: usize, b: usize| rows[a][b];
    let e = (0..order).find(|&e| (0..order).all(|x| mul(e, x) == x && mul(x, e) == x)).ok_or(GroupError::NoIdentity)?;
    for a in 0..order {
        if !(0..order).any(|b| mul(a, b) == e && mul(b, a) == e) {
            return Err(GroupError::NoInverse { element: a });
        }
    }
    for a in 0..order {
        for b in 0..order {
            let ab = mul(a, b);
            for c in 0..order {
                let (left, right) = (mul(ab, c), mul(a, mul(b, c)));
                if left != right {
                    return Err(GroupError::NotAssociative { a, b, c, left, right });
                }
            }
        }
    }
    // Swap labels 0 and e.
    let relabel = |x: usize| {
        if x == e {
            0
        } else if x == 0 {
            e
        } else {
            x
        }
    };
    let mut table = vec![0; order * order];
    for a in 0..order {
        for b in 0..order {
            table[relabel(a) * order + relabel(b)] = relabel(mul(a, b));
        }
    }
    Ok(FiniteGroup::from_table_unchecked(order, table))
}

impl FiniteGroup {
    /// `table` is row-major with identity `0`; the axioms must already hold.
    fn from_table_unchecked(order: usize, table: Vec<usize>) -> Self {
        let mut g = FiniteGroup { order, table, inverses: Vec::new(), element_orders: Vec::new() };
        g.inverses = (0..order).map(|a| (0..order).find(|&b| g.mul(a, b) == 0).unwrap_or(0)).collect();
        g.element_orders = (0..order)
            .map(|a| {
                let (mut x, mut k) = (a, 1);
                while x != 0 {
                    x = g.mul(x, a);
                    k += 1;
                }
                k
            })
            .collect();
        g
    }

    /// Builds a group from a multiplication rule on `0..order`, then validates it.
    pub fn from_fn(order: usize, mul: impl Fn(usize, usize) -> usize) -> Result<Self, GroupError> {
        let rows: Vec<Vec<usize>> = (0..order).map(|a| (0..order).map(|b| mul(a, b)).collect()).collect();
        validate_group(order, &rows)
    }

    /// The group generated by permutations of `0..degree` under composition
    /// (`(p q)(i) = p(q(i))`). Element `0` is the identity; the rest follow in
    /// breadth-first discovery order.
    pub fn from_permutations(degree: usize, generators: &[Vec<usize>]) -> Result<Self, GroupError> {
        for p in generators {
            if !crate::graph::is_permutation(p, degree) {
                return Err(GroupError::Parameter(alloc::format!("not a permutation of 0..{degree}: {p:?}")));
            }
        }
        let identity: Vec<usize> = (0..degree).collect();
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&i| p[i]).collect() };
        let mut elements = vec![identity.clone()];
        let mut index = alloc::collections::BTreeMap::new();
        index.insert(identity, 0usize);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let next = compose(&elements[i], g);
                if !index.contains_key(&next) {
                    index.insert(next.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(next);
                }
            }
        }
        let n = elements.len();
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = index[&compose(&elements[a], &elements[b])];
            }
        }
        Ok(FiniteGroup::from_table_unchecked(n, table))
    }

    /// `ℤ/n`.
    pub fn cyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::Parameter("cyclic group order must be at least 1".into()));
        }
        Ok(FiniteGroup::cyclic_table(n))
    }

    fn cyclic_table(n: usize) -> Self {
        FiniteGroup::from_table_unchecked(n, (0..n * n).map(|i| (i / n + i % n) % n).collect())
    }

    /// `⟨a, x | a^m, x² = a^s, x a x⁻¹ = a⁻¹⟩` with element `a^k x^j` at index `j m + k`.
    fn metacyclic(m: usize, s: usize) -> Self {
        let n = 2 * m;
        let mut table = vec![0; n * n];
        for p in 0..n {
            for q in 0..n {
                let (k1, j1, k2, j2) = (p % m, p / m, q % m, q / m);
                let (k, j) = match (j1, j2) {
                    (0, _) => ((k1 + k2) % m, j2),
                    (_, 0) => ((k1 + m - k2) % m, 1),
                    _ => ((k1 + m - k2 + s) % m, 0),
                };
                table[p * n + q] = j * m + k;
            }
        }
        FiniteGroup::from_table_unchecked(n, table)
    }

    /// Dihedral group of order `2n`, the symmetries of a regular `n`-gon.
    pub fn dihedral(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::Parameter("dihedral group needs n >= 1".into()));
        }
        Ok(FiniteGroup::metacyclic(n, 0))
    }

    /// Dicyclic group of order `4n`; `dicyclic(2)` is the quaternion group.
    pub fn dicyclic(n: usize) -> Result<Self, GroupError> {
        if n == 0 {
            return Err(GroupError::Parameter("dicyclic group needs n >= 1".into()));
        }
        Ok(FiniteGroup::metacyclic(2 * n, n))
    }

    pub fn klein4() -> Self {
        FiniteGroup::product(&FiniteGroup::cyclic_table(2), &FiniteGroup::cyclic_table(2))
    }

    pub fn q8() -> Self {
        FiniteGroup::metacyclic(4, 2)
    }

    /// Alternating group on four letters.
    pub fn a4() -> Self {
        FiniteGroup::from_permutations(4, &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]])
            .expect("3-cycle and double transposition are permutations")
    }

    /// Direct product; `(g, h)` has index `g |H| + h`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (n, m) = (g.order, h.order);
        let size = n * m;
        let mut table = vec![0; size * size];
        for a in 0..size {
            for b in 0..size {
                table[a * size + b] = g.mul(a / m, b / m) * m + h.mul(a % m, b % m);
            }
        }
        FiniteGroup::from_table_unchecked(size, table)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        self.element_orders[a]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Sorted elements of the subgroup generated by `generators`.
    pub fn closure(&self, generators: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = vec![0];
        while let Some(x) = queue.pop() {
            for &g in generators {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push(y);
                }
            }
        }
        (0..self.order).filter(|&x| seen[x]).collect()
    }

    /// Number of elements of each order, indexed by order.
    pub fn order_statistics(&self) -> Vec<usize> {
        let mut stats = vec![0; self.order + 1];
        for &k in &self.element_orders {
            stats[k] += 1;
        }
        stats
    }
}

/// A greedy generating set: repeatedly add the element whose inclusion
/// generates the largest subgroup (lowest index on ties). Sorted by descending
/// element order. Not necessarily of minimum size.
pub fn generating_set(g: &FiniteGroup) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span = 1;
    while span < g.order() {
        let mut best = (span, 0);
        for x in 1..g.order() {
            gens.push(x);
            let size = g.closure(&gens).len();
            gens.pop();
            if size > best.0 {
                best = (size, x);
            }
        }
        gens.push(best.1);
        span = best.0;
    }
    gens.sort_by_key(|&x| (core::cmp::Reverse(g.element_order(x)), x));
    gens
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubgroupError {
    #[error("element {0} is not in the parent group")]
    OutOfRange(usize),
    #[error("subset does not contain the identity")]
    MissingIdentity,
    #[error("not closed: {a} {b} = {product} is missing")]
    NotClosed { a: usize, b: usize, product: usize },
    #[error("inverse of {0} is missing")]
    MissingInverse(usize),
    #[error("size {size} does not divide the group order {order}")]
    Lagrange { size: usize, order: usize },
}

/// A subgroup, as a sorted set of elements of its parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn new(parent: Arc<FiniteGroup>, elements: impl IntoIterator<Item = usize>) -> Result<Self, SubgroupError> {
        let set: BTreeSet<usize> = elements.into_iter().collect();
        if let Some(&x) = set.iter().find(|&&x| x >= parent.order()) {
            return Err(SubgroupError::OutOfRange(x));
        }
        if !set.contains(&0) {
            return Err(SubgroupError::MissingIdentity);
        }
        for &a in &set {
            if !set.contains(&parent.inverse(a)) {
                return Err(SubgroupError::MissingInverse(a));
            }
            for &b in &set {
                let product = parent.mul(a, b);
                if !set.contains(&product) {
                    return Err(SubgroupError::NotClosed { a, b, product });
                }
            }
        }
        if !parent.order().is_multiple_of(set.len()) {
            return Err(SubgroupError::Lagrange { size: set.len(), order: parent.order() });
        }
        Ok(Subgroup { parent, elements: set.into_iter().collect() })
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `[parent : self]`.
    pub fn index(&self) -> usize {
        self.parent.order() / self.elements.len()
    }
}

/// One representative of every isomorphism type of group of order at most
/// `max_order` (supported up to 12), with a short name.
pub fn small_groups(max_order: usize) -> Vec<(&'static str, FiniteGroup)> {
    let z = FiniteGroup::cyclic_table;
    let d = |n| FiniteGroup::metacyclic(n, 0);
    let all = [
        ("Z1", 1),
        ("Z2", 2),
        ("Z3", 3),
        ("Z4", 4),
        ("Z2^2", 4),
        ("Z5", 5),
        ("Z6", 6),
        ("D3", 6),
        ("Z7", 7),
        ("Z8", 8),
        ("Z4xZ2", 8),
        ("Z2^3", 8),
        ("D4", 8),
        ("Q8", 8),
        ("Z9", 9),
        ("Z3^2", 9),
        ("Z10", 10),
        ("D5", 10),
        ("Z11", 11),
        ("Z12", 12),
        ("Z2xZ6", 12),
        ("D6", 12),
        ("A4", 12),
        ("Dic3", 12),
    ];
    all.into_iter()
        .filter(|&(_, n)| n <= max_order)
        .map(|(name, n)| {
            let g = match name {
                "Z2^2" => FiniteGroup::klein4(),
                "Z4xZ2" => FiniteGroup::product(&z(4), &z(2)),
                "Z2^3" => FiniteGroup::product(&FiniteGroup::klein4(), &z(2)),
                "D3" => d(3),
                "D4" => d(4),
                "D5" => d(5),
                "D6" => d(6),
                "Q8" => FiniteGroup::q8(),
                "Z3^2" => FiniteGroup::product(&z(3), &z(3)),
                "Z2xZ6" => FiniteGroup::product(&z(2), &z(6)),
                "A4" => FiniteGroup::a4(),
                "Dic3" => FiniteGroup::metacyclic(6, 3),
                _ => z(n),
            };
            (name, g)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4_rows() -> Vec<Vec<usize>> {
        (0..4).map(|a| (0..4).map(|b| (a + b) % 4).collect()).collect()
    }

    #[test]
    fn validation_accepts_and_renumbers() {
        assert!(validate_group(4, &z4_rows()).is_ok());
        assert_eq!(validate_group(1, &[vec![0]]).unwrap().order(), 1);
        // ℤ/3 with identity labelled 2.
        let rows = vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]];
        let g = validate_group(3, &rows).unwrap();
        assert_eq!(g.mul(0, 1), 1);
        assert_eq!(g.element_order(1), 3);
    }

    #[test]
    fn validation_names_the_failure() {
        // Left-projection-like table breaking associativity but with an identity and inverses.
        let rows = vec![vec![0, 1, 2], vec![1, 0, 0], vec![2, 1, 0]];
        assert!(matches!(validate_group(3, &rows), Err(GroupError::NotAssociative { .. })));
        assert_eq!(validate_group(2, &[vec![0, 1]]), Err(GroupError::RowCount { expected: 2, got: 1 }));
        assert!(matches!(
            validate_group(2, &[vec![0, 1], vec![1, 2]]),
            Err(GroupError::EntryOutOfRange { row: 1, col: 1, value: 2, order: 2 })
        ));
        assert_eq!(validate_group(2, &[vec![1, 1], vec![1, 1]]), Err(GroupError::NoIdentity));
        assert_eq!(validate_group(2, &[vec![0, 1], vec![1, 1]]), Err(GroupError::NoInverse { element: 1 }));
        assert_eq!(validate_group(0, &[]), Err(GroupError::Empty));
    }

    #[test]
    fn constructors_pass_validation() {
        for (name, g) in small_groups(12) {
            assert!(validate_group(g.order(), &g.rows()).is_ok(), "{name}");
        }
        assert_eq!(FiniteGroup::q8().order_statistics()[4], 6);
        assert_eq!(FiniteGroup::a4().order(), 12);
        assert!(!FiniteGroup::a4().is_abelian());
        assert_eq!(FiniteGroup::dicyclic(3).unwrap().order_statistics()[2], 1);
        assert_eq!(FiniteGroup::dihedral(4).unwrap().order_statistics()[2], 5);
    }

    #[test]
    fn corpus_has_every_small_type() {
        let counts = [1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5];
        let corpus = small_groups(12);
        assert_eq!(corpus.len(), 24);
        for (n, &expected) in counts.iter().enumerate() {
            assert_eq!(corpus.iter().filter(|(_, g)| g.order() == n + 1).count(), expected, "order {}", n + 1);
        }
    }

    #[test]
    fn generating_sets() {
        let z6 = FiniteGroup::cyclic(6).unwrap();
        let gens = generating_set(&z6);
        assert_eq!(gens.len(), 1);
        assert_eq!(z6.element_order(gens[0]), 6);
        assert_eq!(generating_set(&FiniteGroup::klein4()).len(), 2);
        assert!(generating_set(&FiniteGroup::cyclic(1).unwrap()).is_empty());
        for (name, g) in small_groups(12) {
            assert_eq!(g.closure(&generating_set(&g)).len(), g.order(), "{name}");
        }
    }

    #[test]
    fn subgroup_checks() {
        let z4 = Arc::new(FiniteGroup::cyclic(4).unwrap());
        assert_eq!(Subgroup::new(z4.clone(), [0, 2]).unwrap().index(), 2);
        assert_eq!(Subgroup::new(z4.clone(), [2]), Err(SubgroupError::MissingIdentity));
        assert!(matches!(Subgroup::new(z4.clone(), [0, 1]), Err(SubgroupError::MissingInverse(1))));
        assert!(matches!(Subgroup::new(z4, [0, 1, 3]), Err(SubgroupError::NotClosed { .. })));
    }
}
