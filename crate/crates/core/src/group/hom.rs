use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{generating_set, FiniteGroup, Subgroup};
use crate::category::{Category, Search, Translation};
use crate::finset::{FinMap, FinSets, SetSize};
use crate::value::{Certificate, Family, MultValue, WitnessedMultiplicity};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HomError {
    #[error("image has {got} entries for a source of order {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("image of {element} is {value}, outside the target of order {order}")]
    OutOfRange { element: usize, value: usize, order: usize },
    #[error("f({x} {y}) != f({x}) f({y})")]
    NotMultiplicative { x: usize, y: usize },
}

/// A homomorphism between finite groups, stored as its table of images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    image: Vec<usize>,
}

impl Serialize for GroupHom {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("GroupHom", 1)?;
        s.serialize_field("image", &self.image)?;
        s.end()
    }
}

impl GroupHom {
    /// Verifies `f(x y) = f(x) f(y)` for every pair.
    pub fn new(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>, image: Vec<usize>) -> Result<Self, HomError> {
        if image.len() != source.order() {
            return Err(HomError::WrongLength { expected: source.order(), got: image.len() });
        }
        if let Some((element, &value)) = image.iter().enumerate().find(|(_, &v)| v >= target.order()) {
            return Err(HomError::OutOfRange { element, value, order: target.order() });
        }
        for x in 0..source.order() {
            for y in 0..source.order() {
                if image[source.mul(x, y)] != target.mul(image[x], image[y]) {
                    return Err(HomError::NotMultiplicative { x, y });
                }
            }
        }
        Ok(GroupHom { source, target, image })
    }

    pub fn identity(g: Arc<FiniteGroup>) -> Self {
        let image = (0..g.order()).collect();
        GroupHom { source: g.clone(), target: g, image }
    }

    pub fn trivial(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>) -> Self {
        let image = vec![0; source.order()];
        GroupHom { source, target, image }
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    /// `g ∘ self`, if `self` lands where `g` starts.
    pub fn then(&self, g: &GroupHom) -> Option<GroupHom> {
        (Arc::ptr_eq(&self.target, &g.source) || self.target == g.source).then(|| GroupHom {
            source: self.source.clone(),
            target: g.target.clone(),
            image: self.image.iter().map(|&x| g.image[x]).collect(),
        })
    }

    pub fn kernel(&self) -> Subgroup {
        let elements = (0..self.source.order()).filter(|&x| self.image[x] == 0).collect();
        Subgroup { parent: self.source.clone(), elements }
    }

    pub fn image_subgroup(&self) -> Subgroup {
        let mut seen = vec![false; self.target.order()];
        for &y in &self.image {
            seen[y] = true;
        }
        let elements = (0..self.target.order()).filter(|&y| seen[y]).collect();
        Subgroup { parent: self.target.clone(), elements }
    }

    pub fn is_injective(&self) -> bool {
        self.image.iter().filter(|&&y| y == 0).count() == 1
    }

    pub fn is_surjective(&self) -> bool {
        self.image_subgroup().len() == self.target.order()
    }

    /// `|Ker f|`.
    pub fn kernel_multiplicity(&self) -> MultValue {
        MultValue::count(self.kernel().len() as u64)
    }

    /// `|H / f(G)|`, the number of cosets of the image.
    pub fn cokernel_multiplicity(&self) -> MultValue {
        MultValue::count(self.image_subgroup().index() as u64)
    }
}

/// Every homomorphism `G -> H`, each exactly once, in a fixed order.
///
/// Generators of `G` get images in increasing index order among the elements
/// whose order divides theirs; each choice is propagated over the Cayley
/// graph of the generators assigned so far and dropped at the first
/// inconsistency.
pub struct HomIter {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    gens: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    cursors: Vec<usize>,
    /// `maps[i]` is the partial map after assigning `i` generators; `NONE` marks
    /// elements outside the generated subgroup.
    maps: Vec<Vec<usize>>,
    done: bool,
}

const NONE: usize = usize::MAX;

pub fn enumerate_homs(source: &Arc<FiniteGroup>, target: &Arc<FiniteGroup>) -> HomIter {
    let gens = generating_set(source);
    let candidates = gens
        .iter()
        .map(|&g| {
            let k = source.element_order(g);
            (0..target.order()).filter(|&h| k.is_multiple_of(target.element_order(h))).collect()
        })
        .collect();
    let mut start = vec![NONE; source.order()];
    start[0] = 0;
    HomIter {
        source: source.clone(),
        target: target.clone(),
        cursors: vec![0; gens.len()],
        gens,
        candidates,
        maps: vec![start],
        done: false,
    }
}

impl HomIter {
    fn extend(&self, level: usize, h: usize) -> Option<Vec<usize>> {
        let (g, s, t) = (self.gens[level], &self.source, &self.target);
        let mut map = self.maps[level].clone();
        if map[g] != NONE {
            return (map[g] == h).then_some(map);
        }
        map[g] = h;
        let mut stack: Vec<usize> = (0..s.order()).filter(|&x| map[x] != NONE).collect();
        while let Some(x) = stack.pop() {
            for &gj in &self.gens[..=level] {
                let y = s.mul(x, gj);
                let fy = t.mul(map[x], map[gj]);
                if map[y] == NONE {
                    map[y] = fy;
                    stack.push(y);
                } else if map[y] != fy {
                    return None;
                }
            }
        }
        Some(map)
    }
}

impl Iterator for HomIter {
    type Item = GroupHom;

    fn next(&mut self) -> Option<GroupHom> {
        let k = self.gens.len();
        while !self.done {
            let level = self.maps.len() - 1;
            if level == k {
                let image = self.maps.pop().unwrap_or_default();
                self.done = k == 0;
                let hom = GroupHom::new(self.source.clone(), self.target.clone(), image);
                debug_assert!(hom.is_ok(), "propagated map is not a homomorphism");
                if let Ok(hom) = hom {
                    return Some(hom);
                }
                continue;
            }
            let cursor = self.cursors[level];
            if cursor == self.candidates[level].len() {
                self.cursors[level] = 0;
                if level == 0 {
                    self.done = true;
                } else {
                    self.maps.pop();
                }
                continue;
            }
            self.cursors[level] += 1;
            if let Some(map) = self.extend(level, self.candidates[level][cursor]) {
                self.maps.push(map);
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupMultiplicities {
    pub m_ker: WitnessedMultiplicity<GroupHom>,
    pub m_coker: WitnessedMultiplicity<GroupHom>,
}

/// `m_Ker(G:H)` and `m_Coker(G:H)` by full enumeration; always exact.
pub fn group_multiplicities(g: &Arc<FiniteGroup>, h: &Arc<FiniteGroup>) -> GroupMultiplicities {
    let ker_floor = g.order().div_ceil(h.order()) as u64;
    let coker_floor = h.order().div_ceil(g.order()) as u64;
    let mut ker: Option<(u64, GroupHom)> = None;
    let mut coker: Option<(u64, GroupHom)> = None;
    for f in enumerate_homs(g, h) {
        let k = f.kernel().len() as u64;
        let c = f.image_subgroup().index() as u64;
        if ker.as_ref().is_none_or(|(v, _)| k < *v) {
            ker = Some((k, f.clone()));
        }
        if coker.as_ref().is_none_or(|(v, _)| c < *v) {
            coker = Some((c, f));
        }
        if ker.as_ref().is_some_and(|(v, _)| *v <= ker_floor) && coker.as_ref().is_some_and(|(v, _)| *v <= coker_floor)
        {
            break;
        }
    }
    // The trivial homomorphism always exists.
    let wrap = |best: Option<(u64, GroupHom)>| {
        let (value, f) = best.unwrap_or_else(|| {
            let t = GroupHom::trivial(g.clone(), h.clone());
            (t.kernel().len() as u64, t)
        });
        WitnessedMultiplicity { value: MultValue::count(value), witness: Some(f), certificate: Certificate::Exact }
    };
    GroupMultiplicities { m_ker: wrap(ker), m_coker: wrap(coker) }
}

/// A bijective homomorphism exists.
pub fn is_isomorphic(g: &Arc<FiniteGroup>, h: &Arc<FiniteGroup>) -> bool {
    g.order() == h.order() && enumerate_homs(g, h).any(|f| f.is_injective())
}

/// Injective homomorphisms exist in both directions.
pub fn weakly_isomorphic(g: &Arc<FiniteGroup>, h: &Arc<FiniteGroup>) -> bool {
    enumerate_homs(g, h).any(|f| f.is_injective()) && enumerate_homs(h, g).any(|f| f.is_injective())
}

/// Surjective homomorphisms exist in both directions.
pub fn co_weakly_isomorphic(g: &Arc<FiniteGroup>, h: &Arc<FiniteGroup>) -> bool {
    enumerate_homs(g, h).any(|f| f.is_surjective()) && enumerate_homs(h, g).any(|f| f.is_surjective())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupMeasure {
    Kernel,
    Cokernel,
}

/// Finite groups and homomorphisms, measured by kernel or cokernel size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupCategory {
    pub measure: GroupMeasure,
}

impl GroupCategory {
    pub fn kernel() -> Self {
        GroupCategory { measure: GroupMeasure::Kernel }
    }

    pub fn cokernel() -> Self {
        GroupCategory { measure: GroupMeasure::Cokernel }
    }
}

impl Category for GroupCategory {
    type Object = Arc<FiniteGroup>;
    type Morphism = GroupHom;

    fn family(&self) -> Family {
        Family::Count
    }

    fn identity(&self, x: &Arc<FiniteGroup>) -> GroupHom {
        GroupHom::identity(x.clone())
    }

    fn compose(&self, f: &GroupHom, g: &GroupHom) -> Option<GroupHom> {
        f.then(g)
    }

    fn multiplicity(&self, f: &GroupHom) -> MultValue {
        match self.measure {
            GroupMeasure::Kernel => f.kernel_multiplicity(),
            GroupMeasure::Cokernel => f.cokernel_multiplicity(),
        }
    }

    fn search<'a>(&'a self, x: &'a Arc<FiniteGroup>, y: &'a Arc<FiniteGroup>) -> Search<'a, GroupHom> {
        Search::exhaustive(enumerate_homs(x, y).map(move |f| {
            let m = self.multiplicity(&f);
            (f, m)
        }))
    }

    /// `|Ker f| = |G| / |f(G)| >= |G| / |H|`, and symmetrically for the cokernel.
    fn lower_bound(&self, x: &Arc<FiniteGroup>, y: &Arc<FiniteGroup>) -> Option<MultValue> {
        let (a, b) = match self.measure {
            GroupMeasure::Kernel => (x.order(), y.order()),
            GroupMeasure::Cokernel => (y.order(), x.order()),
        };
        Some(MultValue::count(a.div_ceil(b) as u64))
    }
}

/// The underlying map of sets. Pulling the fiber-size multiplicity of
/// [`FinSets`] back along it gives the kernel multiplicity, since every
/// nonempty fiber of a homomorphism is a coset of the kernel.
#[derive(Debug, Clone, Copy, Default)]
pub struct ForgetToSets;

impl Translation<GroupCategory, FinSets> for ForgetToSets {
    fn object(&self, x: &Arc<FiniteGroup>) -> SetSize {
        SetSize::new(x.order()).expect("groups are nonempty")
    }

    fn morphism(&self, f: &GroupHom) -> FinMap {
        let codomain = SetSize::new(f.target.order()).expect("groups are nonempty");
        FinMap::new(f.image.clone(), codomain).expect("images lie in the target")
    }
}

#[cfg(test)]
mod tests {
    use super::super::small_groups;
    use super::*;
    use crate::category::{check_multiplicity_axioms, multiplicity_distance, object_multiplicity, Pullback};

    fn z(n: usize) -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::cyclic(n).unwrap())
    }

    /// All functions `G -> H`, filtered by the homomorphism condition.
    fn brute_force_hom_count(g: &FiniteGroup, h: &FiniteGroup) -> usize {
        let (n, m) = (g.order(), h.order());
        let mut image = vec![0; n];
        let mut count = 0;
        loop {
            if (0..n).all(|x| (0..n).all(|y| image[g.mul(x, y)] == h.mul(image[x], image[y]))) {
                count += 1;
            }
            let mut i = 0;
            while i < n {
                image[i] += 1;
                if image[i] < m {
                    break;
                }
                image[i] = 0;
                i += 1;
            }
            if i == n {
                return count;
            }
        }
    }

    #[test]
    fn hom_counts() {
        assert_eq!(enumerate_homs(&z(2), &z(2)).count(), 2);
        assert_eq!(enumerate_homs(&z(2), &z(3)).count(), 1);
        assert_eq!(enumerate_homs(&z(4), &z(2)).count(), 2);
        assert_eq!(enumerate_homs(&z(1), &z(5)).count(), 1);
        assert_eq!(brute_force_hom_count(&FiniteGroup::cyclic(4).unwrap(), &FiniteGroup::cyclic(2).unwrap()), 2);
        let k4 = Arc::new(FiniteGroup::klein4());
        // Hom(V4, V4) = 2x2 matrices over F2.
        assert_eq!(enumerate_homs(&k4, &k4).count(), 16);
        let s3 = Arc::new(FiniteGroup::dihedral(3).unwrap());
        assert_eq!(enumerate_homs(&s3, &s3).count(), 10);
    }

    #[test]
    fn hom_enumeration_is_unique_and_deterministic() {
        let corpus: Vec<_> = small_groups(6).into_iter().map(|(_, g)| Arc::new(g)).collect();
        for g in &corpus {
            for h in &corpus {
                let homs: Vec<_> = enumerate_homs(g, h).collect();
                let mut images: Vec<_> = homs.iter().map(|f| f.image().to_vec()).collect();
                images.sort();
                images.dedup();
                assert_eq!(images.len(), homs.len());
                assert_eq!(homs, enumerate_homs(g, h).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn hom_validation() {
        assert_eq!(GroupHom::new(z(4), z(2), vec![0, 1, 0]), Err(HomError::WrongLength { expected: 4, got: 3 }));
        assert!(matches!(GroupHom::new(z(4), z(2), vec![0, 1, 1, 1]), Err(HomError::NotMultiplicative { .. })));
        assert!(GroupHom::new(z(4), z(2), vec![0, 1, 0, 1]).is_ok());
    }

    #[test]
    fn morphism_multiplicities() {
        let id = GroupHom::identity(z(4));
        assert_eq!(id.kernel_multiplicity(), MultValue::count(1));
        assert_eq!(id.cokernel_multiplicity(), MultValue::count(1));
        let trivial = GroupHom::trivial(z(4), z(2));
        assert_eq!(trivial.kernel_multiplicity(), MultValue::count(4));
        let onto = GroupHom::new(z(4), z(2), vec![0, 1, 0, 1]).unwrap();
        assert_eq!(onto.kernel_multiplicity(), MultValue::count(2));
        assert_eq!(onto.cokernel_multiplicity(), MultValue::count(1));
        assert_eq!(GroupHom::trivial(z(2), z(3)).cokernel_multiplicity(), MultValue::count(3));
    }

    #[test]
    fn object_multiplicities() {
        let m = group_multiplicities(&z(2), &z(3));
        assert_eq!((m.m_ker.value, m.m_coker.value), (MultValue::count(2), MultValue::count(3)));
        let m = group_multiplicities(&z(4), &z(2));
        assert_eq!((m.m_ker.value, m.m_coker.value), (MultValue::count(2), MultValue::count(1)));
        let q8 = Arc::new(FiniteGroup::q8());
        let m = group_multiplicities(&q8, &q8);
        assert_eq!((m.m_ker.value, m.m_coker.value), (MultValue::count(1), MultValue::count(1)));
        assert_eq!(m.m_ker.certificate, Certificate::Exact);

        let via_category = object_multiplicity(&GroupCategory::kernel(), &z(4), &z(2)).unwrap();
        assert_eq!(via_category.value, MultValue::count(2));
    }

    #[test]
    fn kernel_multiplicity_is_a_pullback_of_fiber_size() {
        let pulled = Pullback { source: GroupCategory::cokernel(), base: FinSets::new(), functor: ForgetToSets };
        let corpus: Vec<_> = small_groups(8).into_iter().map(|(_, g)| Arc::new(g)).collect();
        for g in &corpus {
            for h in &corpus {
                for f in enumerate_homs(g, h) {
                    assert_eq!(pulled.multiplicity(&f), f.kernel_multiplicity());
                }
            }
        }
    }

    #[test]
    fn isomorphism_tests() {
        let k4 = Arc::new(FiniteGroup::klein4());
        assert!(!is_isomorphic(&z(4), &k4));
        assert!(!weakly_isomorphic(&z(4), &k4));
        assert!(!co_weakly_isomorphic(&z(4), &k4));
        let z2z3 = Arc::new(FiniteGroup::product(&FiniteGroup::cyclic(2).unwrap(), &FiniteGroup::cyclic(3).unwrap()));
        assert!(is_isomorphic(&z(6), &z2z3));
        assert!(weakly_isomorphic(&z(6), &z2z3));
        assert!(co_weakly_isomorphic(&z(6), &z2z3));
        let a4 = Arc::new(FiniteGroup::a4());
        assert!(is_isomorphic(&a4, &a4));
    }

    #[test]
    fn distances_agree_on_small_corpus() {
        let corpus: Vec<_> = small_groups(8).into_iter().map(|(_, g)| Arc::new(g)).collect();
        for g in &corpus {
            for h in &corpus {
                let dk = multiplicity_distance(&GroupCategory::kernel(), g, h).unwrap();
                let dc = multiplicity_distance(&GroupCategory::cokernel(), g, h).unwrap();
                assert_eq!(dk.distance.product, dc.distance.product);
                assert_eq!(dk.distance.is_zero(), is_isomorphic(g, h));
            }
        }
    }

    #[test]
    fn axioms_hold_on_composable_pairs() {
        let corpus: Vec<_> = small_groups(6).into_iter().map(|(_, g)| Arc::new(g)).collect();
        let mut pairs = Vec::new();
        for a in &corpus {
            for b in &corpus {
                for c in &corpus {
                    for f in enumerate_homs(a, b) {
                        for g in enumerate_homs(b, c) {
                            pairs.push((f.clone(), g));
                        }
                    }
                }
            }
        }
        for inst in [GroupCategory::kernel(), GroupCategory::cokernel()] {
            let report = check_multiplicity_axioms(&inst, &corpus, &pairs);
            assert!(report.is_clean(), "{:?}", report.violations);
        }
    }

    #[test]
    fn witness_json_shape() {
        let m = group_multiplicities(&z(2), &z(2));
        let json = serde_json::to_string(&m.m_ker).unwrap();
        assert_eq!(json, r#"{"value":{"count":1},"witness":{"image":[0,1]},"certificate":"exact"}"#);
    }
}
