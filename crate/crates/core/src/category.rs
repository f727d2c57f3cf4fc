//! The generic multiplicity framework.
//!
//! A [`Category`] instance supplies identities, composition, a per-morphism
//! multiplicity and its own morphism search. The framework never enumerates
//! Hom sets abstractly; each instance decides how to search and whether that
//! search is exhaustive.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::value::{mult_product, Certificate, DistValue, Family, MultError, MultValue, WitnessedMultiplicity};

/// Candidate morphisms `X -> Y` with their multiplicities.
pub struct Search<'a, M> {
    pub candidates: Box<dyn Iterator<Item = (M, MultValue)> + 'a>,
    /// `true` when `candidates` covers every morphism `X -> Y`.
    pub exhaustive: bool,
}

impl<'a, M: 'a> Search<'a, M> {
    pub fn exhaustive(candidates: impl Iterator<Item = (M, MultValue)> + 'a) -> Self {
        Search { candidates: Box::new(candidates), exhaustive: true }
    }

    pub fn partial(candidates: impl Iterator<Item = (M, MultValue)> + 'a) -> Self {
        Search { candidates: Box::new(candidates), exhaustive: false }
    }

    pub fn empty() -> Self {
        Search { candidates: Box::new(core::iter::empty()), exhaustive: true }
    }
}

/// A category equipped with a multiplicity on its morphisms.
pub trait Category {
    type Object;
    type Morphism;

    /// Value family of every finite multiplicity this instance produces.
    fn family(&self) -> Family;

    fn identity(&self, x: &Self::Object) -> Self::Morphism;

    /// `g ∘ f`, or `None` when `f` and `g` are not composable.
    fn compose(&self, f: &Self::Morphism, g: &Self::Morphism) -> Option<Self::Morphism>;

    fn multiplicity(&self, f: &Self::Morphism) -> MultValue;

    fn search<'a>(&'a self, x: &'a Self::Object, y: &'a Self::Object) -> Search<'a, Self::Morphism>;

    /// A proven lower bound on `m(X:Y)`, if the instance knows one. Reaching it
    /// certifies a non-exhaustive search as exact.
    fn lower_bound(&self, _x: &Self::Object, _y: &Self::Object) -> Option<MultValue> {
        None
    }
}

/// Cooperative cancellation for long searches.
pub trait Deadline {
    fn expired(&self) -> bool;
}

/// A deadline that never expires.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoDeadline;

impl Deadline for NoDeadline {
    fn expired(&self) -> bool {
        false
    }
}

impl<D: Deadline + ?Sized> Deadline for &D {
    fn expired(&self) -> bool {
        (**self).expired()
    }
}

/// `m(X:Y)`: the minimum of the instance's search, with the first morphism
/// attaining it as witness. An empty search gives `Infinity`.
pub fn object_multiplicity<C: Category>(
    inst: &C,
    x: &C::Object,
    y: &C::Object,
) -> Result<WitnessedMultiplicity<C::Morphism>, MultError> {
    let family = inst.family();
    let floor = inst.lower_bound(x, y).unwrap_or(MultValue::one(family));
    let search = inst.search(x, y);
    let exhaustive = search.exhaustive;
    let mut best: Option<(C::Morphism, MultValue)> = None;
    for (morphism, value) in search.candidates {
        if value.family().is_some_and(|f| f != family) {
            return Err(MultError::FamilyMismatch(MultValue::one(family), value));
        }
        let better = match &best {
            None => true,
            Some((_, current)) => value < *current,
        };
        if better {
            best = Some((morphism, value));
            if value <= floor {
                break;
            }
        }
    }
    Ok(match best {
        None => WitnessedMultiplicity {
            value: MultValue::Infinity,
            witness: None,
            certificate: if exhaustive { Certificate::Exact } else { Certificate::UpperBound },
        },
        Some((morphism, value)) => WitnessedMultiplicity {
            value,
            witness: Some(morphism),
            certificate: if exhaustive || value <= floor { Certificate::Exact } else { Certificate::UpperBound },
        },
    })
}

/// A distance with the weaker certificate of its two directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifiedDistance {
    pub distance: DistValue,
    pub certificate: Certificate,
}

/// `d(X, Y) = ln(m(X:Y) m(Y:X))`, decided on the exact product.
pub fn multiplicity_distance<C: Category>(
    inst: &C,
    x: &C::Object,
    y: &C::Object,
) -> Result<CertifiedDistance, MultError> {
    let forward = object_multiplicity(inst, x, y)?;
    let backward = object_multiplicity(inst, y, x)?;
    Ok(CertifiedDistance {
        distance: DistValue::from_pair(forward.value, backward.value)?,
        certificate: forward.certificate.meet(backward.certificate),
    })
}

/// Object and morphism translation between two categories (a functor).
pub trait Translation<S: Category, B: Category> {
    fn object(&self, x: &S::Object) -> B::Object;
    fn morphism(&self, f: &S::Morphism) -> B::Morphism;
}

/// The pull-back of `base`'s multiplicity along a translation: morphisms of
/// `source`, measured as `m(f) = m_base(F(f))`.
pub struct Pullback<S, B, F> {
    pub source: S,
    pub base: B,
    pub functor: F,
}

impl<S, B, F> Category for Pullback<S, B, F>
where
    S: Category,
    B: Category,
    F: Translation<S, B>,
{
    type Object = S::Object;
    type Morphism = S::Morphism;

    fn family(&self) -> Family {
        self.base.family()
    }

    fn identity(&self, x: &S::Object) -> S::Morphism {
        self.source.identity(x)
    }

    fn compose(&self, f: &S::Morphism, g: &S::Morphism) -> Option<S::Morphism> {
        self.source.compose(f, g)
    }

    fn multiplicity(&self, f: &S::Morphism) -> MultValue {
        self.base.multiplicity(&self.functor.morphism(f))
    }

    fn search<'a>(&'a self, x: &'a S::Object, y: &'a S::Object) -> Search<'a, S::Morphism> {
        let inner = self.source.search(x, y);
        Search {
            exhaustive: inner.exhaustive,
            candidates: Box::new(inner.candidates.map(move |(f, _)| {
                let value = self.multiplicity(&f);
                (f, value)
            })),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `m(id_X) != 1`.
    Identity,
    /// `m(g ∘ f) > m(f) m(g)`.
    Submultiplicativity,
    NotComposable,
    FamilyMismatch,
    /// `d(X, X) != 0` or a product below one.
    SelfDistance,
    Symmetry,
    Triangle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

/// Outcome of an axiom or metric audit. Violations are data, not errors.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub violations: Vec<Violation>,
    #[serde(skip)]
    pub checks: usize,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: AxiomReport) {
        self.violations.extend(other.violations);
        self.checks += other.checks;
    }

    fn push(&mut self, kind: ViolationKind, detail: String) {
        self.violations.push(Violation { kind, detail });
    }
}

/// Checks `m(id_X) = 1` on every object and `m(g ∘ f) <= m(f) m(g)` on every
/// sampled pair `(f, g)`.
pub fn check_multiplicity_axioms<C: Category>(
    inst: &C,
    objects: &[C::Object],
    pairs: &[(C::Morphism, C::Morphism)],
) -> AxiomReport {
    let mut report = AxiomReport::default();
    let one = MultValue::one(inst.family());
    for (i, x) in objects.iter().enumerate() {
        report.checks += 1;
        let m = inst.multiplicity(&inst.identity(x));
        if m != one {
            report.push(ViolationKind::Identity, format!("object #{i}: m(id) = {m}"));
        }
    }
    for (i, (f, g)) in pairs.iter().enumerate() {
        report.checks += 1;
        let Some(gf) = inst.compose(f, g) else {
            report.push(ViolationKind::NotComposable, format!("pair #{i}"));
            continue;
        };
        let (mf, mg, mgf) = (inst.multiplicity(f), inst.multiplicity(g), inst.multiplicity(&gf));
        match mult_product(mf, mg) {
            Ok(bound) => {
                if mgf.partial_cmp(&bound).is_none_or(|o| o.is_gt()) {
                    report.push(
                        ViolationKind::Submultiplicativity,
                        format!("pair #{i}: m(g∘f) = {mgf} > m(f) m(g) = {mf} * {mg}"),
                    );
                }
            }
            Err(e) => report.push(ViolationKind::FamilyMismatch, format!("pair #{i}: {e}")),
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PseudoDistanceError {
    #[error("m(#{from}:#{to}) is only an upper bound; metric checks would be inconclusive")]
    Inconclusive { from: usize, to: usize },
    #[error("object index {0} out of range")]
    IndexOutOfRange(usize),
    #[error(transparent)]
    Mult(#[from] MultError),
}

/// Verifies non-negativity with `d(X,X) = 0`, symmetry and the triangle
/// inequality on each triple of object indices, comparing exact products.
pub fn check_pseudo_distance<C: Category>(
    inst: &C,
    objects: &[C::Object],
    triples: &[(usize, usize, usize)],
) -> Result<AxiomReport, PseudoDistanceError> {
    let mut cache: BTreeMap<(usize, usize), MultValue> = BTreeMap::new();
    let mut directed = |a: usize, b: usize| -> Result<MultValue, PseudoDistanceError> {
        if let Some(v) = cache.get(&(a, b)) {
            return Ok(*v);
        }
        let (x, y) = (
            objects.get(a).ok_or(PseudoDistanceError::IndexOutOfRange(a))?,
            objects.get(b).ok_or(PseudoDistanceError::IndexOutOfRange(b))?,
        );
        let m = object_multiplicity(inst, x, y)?;
        if m.certificate != Certificate::Exact {
            return Err(PseudoDistanceError::Inconclusive { from: a, to: b });
        }
        cache.insert((a, b), m.value);
        Ok(m.value)
    };

    let one = MultValue::one(inst.family());
    let mut report = AxiomReport::default();
    for &(a, b, c) in triples {
        for v in [a, b, c] {
            report.checks += 1;
            let m = directed(v, v)?;
            let self_product = mult_product(m, m)?;
            if !self_product.is_one() {
                report.push(ViolationKind::SelfDistance, format!("d(#{v}, #{v}) has product {self_product}"));
            }
        }
        let ab = mult_product(directed(a, b)?, directed(b, a)?)?;
        let ba = mult_product(directed(b, a)?, directed(a, b)?)?;
        let bc = mult_product(directed(b, c)?, directed(c, b)?)?;
        let ac = mult_product(directed(a, c)?, directed(c, a)?)?;
        report.checks += 3;
        if ab.partial_cmp(&one).is_none_or(|o| o.is_lt()) {
            report.push(ViolationKind::SelfDistance, format!("d(#{a}, #{b}) has product {ab} < 1"));
        }
        if ab != ba {
            report.push(ViolationKind::Symmetry, format!("d(#{a}, #{b}) = {ab} but d(#{b}, #{a}) = {ba}"));
        }
        let bound = mult_product(ab, bc)?;
        if ac.partial_cmp(&bound).is_none_or(|o| o.is_gt()) {
            report.push(
                ViolationKind::Triangle,
                format!("d(#{a}, #{c}) = {ac} exceeds d(#{a}, #{b}) + d(#{b}, #{c}) = {ab} * {bc}"),
            );
        }
    }
    Ok(report)
}
