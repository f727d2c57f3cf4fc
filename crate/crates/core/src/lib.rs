//! Exact multiplicities of one object over another.
//!
//! A *multiplicity* assigns each morphism `f` a value `m(f) >= 1` (or `∞`) with
//! `m(id) = 1` and `m(g ∘ f) <= m(f) m(g)`. Minimizing over all morphisms
//! `X -> Y` gives `m(X:Y)`, and `ln(m(X:Y) m(Y:X))` is a pseudo-distance on
//! objects. This crate computes those quantities exactly for:
//!
//! * finite sets with the map-multiplicity (largest fiber), [`finset`];
//! * finite graphs mapped to the circle, [`graph`];
//! * finite groups with kernel/cokernel multiplicities, [`group`];
//! * finitely generated ℤ-modules with kernel/cokernel rank multiplicities, [`module`];
//! * a bound-inference engine for the knot multiplicity index, [`knot`].
//!
//! Values are kept in exact arithmetic ([`MultValue`]); floating point only
//! appears in derived display fields. Every minimized value carries a
//! [`Certificate`] saying whether it is proven optimal or only attained.
//!
//! The crate is `no_std` (it needs `alloc`). IO, parallel drivers and the
//! command line live in the `multicat` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod category;
pub mod finset;
pub mod graph;
pub mod group;
pub mod knot;
pub mod module;
mod value;

pub use category::{
    check_multiplicity_axioms, check_pseudo_distance, multiplicity_distance, object_multiplicity, AxiomReport,
    Category, CertifiedDistance, Deadline, NoDeadline, PseudoDistanceError, Pullback, Search, Translation, Violation,
    ViolationKind,
};
pub use value::{mult_product, Certificate, DistValue, Family, MultError, MultValue, WitnessedMultiplicity};
