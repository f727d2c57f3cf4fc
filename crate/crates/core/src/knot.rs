//! Bounds on the knot multiplicity index `m(K) = m_K(K:T)` and on pairwise
//! knot multiplicities, inferred from user-supplied classical invariants.
//!
//! Nothing here computes an invariant from a diagram: every input is an
//! assertion, absent fields are unknown, and each rule fires only when its
//! hypotheses are asserted (or derived by an earlier rule).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize, Serializer};

use crate::value::{DistValue, MultValue};

/// Assertions about one oriented knot type.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnotRecord {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_trivial: Option<bool>,
    /// `K` is the `(2, p)`-torus knot for this odd `p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus_2p: Option<i64>,
    /// `K` is a `(2, p)`-torus knot for some odd `p != ±1`; `false` denies it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_torus_2p: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub braid_index: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bridge_index: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunk: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_montesinos: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_connected_sum_of_2bridge: Option<bool>,
}

/// Assertions relating two knot types `K1`, `K2`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRelation {
    /// `K1 = K2` or `K1 = -K2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equal_up_to_reversal: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2_nontrivial: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2_is_companion_of_k1: Option<bool>,
    /// `K1` is a `(2, p)`-cable knot of `K2` or `-K2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1_is_2cable_of_k2: Option<bool>,
}

/// The inference rules, each a proven statement about knot multiplicities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleId {
    TrivialIffOne,
    TwoIffNontrivialTorus2p,
    ThreeIffBraidThreeOrTwoBridgeSum,
    MontesinosAtMostFour,
    AtMostBraidIndex,
    AtMostTwiceBridgeMinusOne,
    AtLeastHalfTrunk,
    AtMostTrunk,
    OneIffEqualUpToReversal,
    TwoIffTrivialOverNontrivialOrTwoCable,
    AtLeastTrunkRatio,
    TrunkExactForNoncompanionTarget,
}

impl RuleId {
    /// The snake_case identifier used in serialized output.
    pub fn id(self) -> &'static str {
        match self {
            RuleId::TrivialIffOne => "trivial_iff_one",
            RuleId::TwoIffNontrivialTorus2p => "two_iff_nontrivial_torus2p",
            RuleId::ThreeIffBraidThreeOrTwoBridgeSum => "three_iff_braid_three_or_two_bridge_sum",
            RuleId::MontesinosAtMostFour => "montesinos_at_most_four",
            RuleId::AtMostBraidIndex => "at_most_braid_index",
            RuleId::AtMostTwiceBridgeMinusOne => "at_most_twice_bridge_minus_one",
            RuleId::AtLeastHalfTrunk => "at_least_half_trunk",
            RuleId::AtMostTrunk => "at_most_trunk",
            RuleId::OneIffEqualUpToReversal => "one_iff_equal_up_to_reversal",
            RuleId::TwoIffTrivialOverNontrivialOrTwoCable => "two_iff_trivial_over_nontrivial_or_two_cable",
            RuleId::AtLeastTrunkRatio => "at_least_trunk_ratio",
            RuleId::TrunkExactForNoncompanionTarget => "trunk_exact_for_noncompanion_target",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            RuleId::TrivialIffOne => "m(K) = 1 iff K is trivial",
            RuleId::TwoIffNontrivialTorus2p => "m(K) = 2 iff K is a (2,p)-torus knot for some odd p != ±1",
            RuleId::ThreeIffBraidThreeOrTwoBridgeSum => {
                "m(K) = 3 iff braid(K) = 3 or K is a connected sum of 2-bridge knots"
            }
            RuleId::MontesinosAtMostFour => "m(K) <= 4 for a Montesinos knot K",
            RuleId::AtMostBraidIndex => "m(K) <= braid(K)",
            RuleId::AtMostTwiceBridgeMinusOne => "m(K) <= 2 bridge(K) - 1",
            RuleId::AtLeastHalfTrunk => "m(K) >= trunk(K) / 2",
            RuleId::AtMostTrunk => "m(K1:K2) <= trunk(K1)",
            RuleId::OneIffEqualUpToReversal => "m(K1:K2) = 1 iff K1 = K2 or K1 = -K2",
            RuleId::TwoIffTrivialOverNontrivialOrTwoCable => {
                "m(K1:K2) = 2 iff K1 is trivial and K2 is not, or K1 is nontrivial and a (2,p)-cable of ±K2"
            }
            RuleId::AtLeastTrunkRatio => "m(K1:K2) >= trunk(K1) / trunk(K2)",
            RuleId::TrunkExactForNoncompanionTarget => {
                "m(K1:K2) = trunk(K1) when K2 is nontrivial, not ±K1, and not a companion of K1"
            }
        }
    }
}

impl core::fmt::Display for RuleId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} ({})", self.id(), self.statement())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KnotError {
    #[error("record {name:?}: field {field} {reason}")]
    InvalidField { name: String, field: &'static str, reason: String },
    #[error("inconsistent assertions: {first} forces m >= {lower} but {second} forces m <= {upper}")]
    Inconsistent { first: RuleId, second: RuleId, lower: u64, upper: u64 },
    #[error("inconsistent assertions: {first} and {second} disagree on {what}")]
    Contradiction { first: RuleId, second: RuleId, what: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleFiring {
    pub rule: RuleId,
    pub statement: &'static str,
    pub effect: String,
}

/// An upper bound, possibly `∞`; serialized as a number or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Upper {
    Finite(u64),
    Infinite,
}

impl Serialize for Upper {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Upper::Finite(v) => serializer.serialize_u64(*v),
            Upper::Infinite => serializer.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsResult {
    pub lower: u64,
    pub upper: Upper,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<u64>,
    /// Values strictly between `lower` and `upper` ruled out by a rule.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub excluded: Vec<u64>,
    pub rules_applied: Vec<RuleFiring>,
}

impl BoundsResult {
    /// `self` lies within `other`.
    pub fn is_within(&self, other: &BoundsResult) -> bool {
        self.lower >= other.lower && self.upper <= other.upper
    }
}

struct Engine {
    lower: u64,
    lower_by: RuleId,
    upper: Option<u64>,
    upper_by: RuleId,
    excluded: BTreeMap<u64, RuleId>,
    firings: Vec<RuleFiring>,
    changed: bool,
}

impl Engine {
    fn new(default_rule: RuleId) -> Self {
        Engine {
            lower: 1,
            lower_by: default_rule,
            upper: None,
            upper_by: default_rule,
            excluded: BTreeMap::new(),
            firings: Vec::new(),
            changed: false,
        }
    }

    fn fire(&mut self, rule: RuleId, effect: String) {
        self.changed = true;
        self.firings.push(RuleFiring { rule, statement: rule.statement(), effect });
    }

    fn raise(&mut self, v: u64, rule: RuleId) {
        if v > self.lower {
            self.lower = v;
            self.lower_by = rule;
            self.fire(rule, format!("m >= {v}"));
        }
    }

    fn cap(&mut self, v: u64, rule: RuleId) {
        if self.upper.is_none_or(|u| v < u) {
            self.upper = Some(v);
            self.upper_by = rule;
            self.fire(rule, format!("m <= {v}"));
        }
    }

    fn pin(&mut self, v: u64, rule: RuleId) {
        self.raise(v, rule);
        self.cap(v, rule);
    }

    fn exclude(&mut self, v: u64, rule: RuleId) {
        if let alloc::collections::btree_map::Entry::Vacant(e) = self.excluded.entry(v) {
            e.insert(rule);
            self.fire(rule, format!("m != {v}"));
        }
    }

    fn normalize(&mut self) -> Result<(), KnotError> {
        while let Some(&rule) = self.excluded.get(&self.lower) {
            if self.upper == Some(self.lower) {
                return Err(KnotError::Inconsistent {
                    first: rule,
                    second: self.upper_by,
                    lower: self.lower + 1,
                    upper: self.lower,
                });
            }
            self.lower += 1;
            self.lower_by = rule;
        }
        while let Some(u) = self.upper {
            match self.excluded.get(&u) {
                Some(&rule) if u > self.lower => {
                    self.upper = Some(u - 1);
                    self.upper_by = rule;
                }
                _ => break,
            }
        }
        match self.upper {
            Some(u) if u < self.lower => Err(KnotError::Inconsistent {
                first: self.lower_by,
                second: self.upper_by,
                lower: self.lower,
                upper: u,
            }),
            _ => Ok(()),
        }
    }

    fn finish(self) -> BoundsResult {
        let exact = (self.upper == Some(self.lower)).then_some(self.lower);
        let excluded =
            self.excluded.keys().copied().filter(|&v| v > self.lower && self.upper.is_none_or(|u| v < u)).collect();
        BoundsResult {
            lower: self.lower,
            upper: self.upper.map_or(Upper::Infinite, Upper::Finite),
            exact,
            excluded,
            rules_applied: self.firings,
        }
    }
}

fn invalid(rec: &KnotRecord, field: &'static str, reason: impl Into<String>) -> KnotError {
    KnotError::InvalidField { name: rec.name.clone(), field, reason: reason.into() }
}

/// Checks value ranges and the agreement of `torus_2p` with `is_torus_2p`.
pub fn validate_record(rec: &KnotRecord) -> Result<(), KnotError> {
    if let Some(p) = rec.torus_2p {
        if p % 2 == 0 {
            return Err(invalid(rec, "torus_2p", format!("must be odd, got {p}")));
        }
        if rec.is_torus_2p.is_some_and(|t| t != (p.abs() != 1)) {
            return Err(invalid(rec, "is_torus_2p", format!("contradicts torus_2p = {p}")));
        }
    }
    if rec.braid_index == Some(0) {
        return Err(invalid(rec, "braid_index", "must be at least 1"));
    }
    if rec.bridge_index == Some(0) {
        return Err(invalid(rec, "bridge_index", "must be at least 1"));
    }
    if rec.trunk.is_some_and(|t| t < 2) {
        return Err(invalid(rec, "trunk", "must be at least 2"));
    }
    Ok(())
}

/// Whether the record makes `K` a `(2, p)`-torus knot with `p != ±1`.
fn nontrivial_torus(rec: &KnotRecord) -> Option<bool> {
    rec.torus_2p.map(|p| p.abs() != 1).or(rec.is_torus_2p)
}

/// Tightest bounds on `m(K)` derivable from the record.
pub fn multiplicity_index_bounds(rec: &KnotRecord) -> Result<BoundsResult, KnotError> {
    validate_record(rec)?;
    let mut e = Engine::new(RuleId::TrivialIffOne);
    let torus = nontrivial_torus(rec);
    let torus_trivial = rec.torus_2p.is_some_and(|p| p.abs() == 1);

    loop {
        e.changed = false;
        // Triviality, asserted or derived from the current interval.
        let trivial = match rec.is_trivial {
            Some(t) => Some(t),
            None if torus_trivial || e.upper == Some(1) => Some(true),
            None if e.lower >= 2 => Some(false),
            None => None,
        };
        match trivial {
            Some(true) => e.pin(1, RuleId::TrivialIffOne),
            Some(false) => e.exclude(1, RuleId::TrivialIffOne),
            None => {}
        }
        if torus_trivial {
            e.pin(1, RuleId::TrivialIffOne);
        }

        match torus {
            Some(true) => e.pin(2, RuleId::TwoIffNontrivialTorus2p),
            Some(false) => e.exclude(2, RuleId::TwoIffNontrivialTorus2p),
            None => {}
        }

        if rec.braid_index == Some(3) {
            e.pin(3, RuleId::ThreeIffBraidThreeOrTwoBridgeSum);
        }
        if rec.is_connected_sum_of_2bridge == Some(true) {
            e.cap(3, RuleId::ThreeIffBraidThreeOrTwoBridgeSum);
        }
        if rec.braid_index.is_some_and(|b| b != 3) && rec.is_connected_sum_of_2bridge == Some(false) {
            e.exclude(3, RuleId::ThreeIffBraidThreeOrTwoBridgeSum);
        }

        if rec.is_montesinos == Some(true) {
            e.cap(4, RuleId::MontesinosAtMostFour);
        }
        if let Some(b) = rec.braid_index {
            e.cap(b, RuleId::AtMostBraidIndex);
        }
        if let Some(b) = rec.bridge_index {
            e.cap(2 * b - 1, RuleId::AtMostTwiceBridgeMinusOne);
        }
        if let Some(t) = rec.trunk {
            e.raise(t.div_ceil(2), RuleId::AtLeastHalfTrunk);
            e.cap(t, RuleId::AtMostTrunk);
        }
        e.normalize()?;
        if !e.changed {
            break;
        }
    }
    Ok(e.finish())
}

/// Bounds on `m_K(K1:K2)`.
pub fn pair_multiplicity_facts(
    rec1: &KnotRecord,
    rec2: &KnotRecord,
    relation: &PairRelation,
) -> Result<BoundsResult, KnotError> {
    let b1 = multiplicity_index_bounds(rec1)?;
    let b2 = multiplicity_index_bounds(rec2)?;
    let trivial = |b: &BoundsResult| match (b.lower, b.upper) {
        (_, Upper::Finite(1)) => Some(true),
        (l, _) if l >= 2 => Some(false),
        _ => None,
    };
    let k1_trivial = trivial(&b1);
    let k2_trivial_from_record = trivial(&b2);
    let k2_nontrivial = match (relation.k2_nontrivial, k2_trivial_from_record.map(|t| !t)) {
        (Some(a), Some(b)) if a != b => {
            return Err(KnotError::Contradiction {
                first: RuleId::TrivialIffOne,
                second: RuleId::TwoIffTrivialOverNontrivialOrTwoCable,
                what: "whether K2 is trivial",
            })
        }
        (a, b) => a.or(b),
    };

    let mut e = Engine::new(RuleId::OneIffEqualUpToReversal);
    match relation.equal_up_to_reversal {
        Some(true) => e.pin(1, RuleId::OneIffEqualUpToReversal),
        Some(false) => e.exclude(1, RuleId::OneIffEqualUpToReversal),
        None => {}
    }

    // The second clause with K2 trivial is K1 being a nontrivial (2,p)-torus knot.
    let cable = match (relation.k1_is_2cable_of_k2, k2_nontrivial) {
        (Some(c), _) => Some(c),
        (None, Some(false)) => nontrivial_torus(rec1),
        _ => None,
    };
    let first_clause = match (k1_trivial, k2_nontrivial) {
        (Some(true), Some(true)) => Some(true),
        (Some(false), _) | (_, Some(false)) => Some(false),
        _ => None,
    };
    let second_clause = match (k1_trivial, cable) {
        (Some(false), Some(true)) => Some(true),
        (Some(true), _) | (_, Some(false)) => Some(false),
        _ => None,
    };
    if first_clause == Some(true) || second_clause == Some(true) {
        e.pin(2, RuleId::TwoIffTrivialOverNontrivialOrTwoCable);
    } else if first_clause == Some(false) && second_clause == Some(false) {
        e.exclude(2, RuleId::TwoIffTrivialOverNontrivialOrTwoCable);
    }

    // The trivial knot has trunk 2.
    let t1 = rec1.trunk.or((k1_trivial == Some(true)).then_some(2));
    let t2 = rec2.trunk.or((k2_nontrivial == Some(false)).then_some(2));
    if let Some(t1) = t1 {
        e.cap(t1, RuleId::AtMostTrunk);
        if let Some(t2) = t2 {
            e.raise(t1.div_ceil(t2), RuleId::AtLeastTrunkRatio);
        }
        if k2_nontrivial == Some(true)
            && relation.equal_up_to_reversal == Some(false)
            && relation.k2_is_companion_of_k1 == Some(false)
        {
            e.pin(t1, RuleId::TrunkExactForNoncompanionTarget);
        }
    }
    e.normalize()?;
    Ok(e.finish())
}

/// Outcome of bounding `d_K(K, T)` from below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnknotDistance {
    /// `K` is trivial, so the distance is `0`.
    Zero(DistValue),
    /// `d(K, T) >= ln(product)`.
    AtLeast(DistValue),
    /// Triviality or trunk is unknown.
    InsufficientData,
}

/// `d(K, T) >= ln(m(K) · m(T:K)) >= ln(trunk(K)/2 · 2) = ln trunk(K)` for
/// nontrivial `K`, using `m(T:K) = trunk(T) = 2`.
pub fn distance_lower_bound_to_unknot(rec: &KnotRecord) -> Result<UnknotDistance, KnotError> {
    let b = multiplicity_index_bounds(rec)?;
    if b.upper == Upper::Finite(1) {
        return Ok(UnknotDistance::Zero(DistValue::from_product(MultValue::count(1))));
    }
    match (b.lower >= 2, rec.trunk) {
        (true, Some(t)) => Ok(UnknotDistance::AtLeast(DistValue::from_product(MultValue::count(t)))),
        _ => Ok(UnknotDistance::InsufficientData),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec() -> KnotRecord {
        KnotRecord::default()
    }

    fn exact(r: &KnotRecord) -> Option<u64> {
        multiplicity_index_bounds(r).unwrap().exact
    }

    #[test]
    fn classification_examples() {
        assert_eq!(exact(&KnotRecord { is_trivial: Some(true), ..rec() }), Some(1));
        assert_eq!(exact(&KnotRecord { torus_2p: Some(3), ..rec() }), Some(2));
        assert_eq!(exact(&KnotRecord { torus_2p: Some(-1), ..rec() }), Some(1));
        let fig8 = KnotRecord { braid_index: Some(3), is_torus_2p: Some(false), is_trivial: Some(false), ..rec() };
        assert_eq!(exact(&fig8), Some(3));

        let b = multiplicity_index_bounds(&KnotRecord { is_montesinos: Some(true), trunk: Some(8), ..rec() }).unwrap();
        assert_eq!((b.lower, b.upper, b.exact), (4, Upper::Finite(4), Some(4)));

        let b =
            multiplicity_index_bounds(&KnotRecord { bridge_index: Some(2), is_trivial: Some(false), ..rec() }).unwrap();
        assert_eq!((b.lower, b.upper, b.exact), (2, Upper::Finite(3), None));
    }

    #[test]
    fn contrapositive_needs_full_hypotheses() {
        let base = KnotRecord { is_trivial: Some(false), is_torus_2p: Some(false), braid_index: Some(5), ..rec() };
        assert_eq!(multiplicity_index_bounds(&base).unwrap().lower, 3);
        let denied = KnotRecord { is_connected_sum_of_2bridge: Some(false), ..base };
        assert_eq!(multiplicity_index_bounds(&denied).unwrap().lower, 4);
    }

    #[test]
    fn braid_one_forces_trivial() {
        let b = multiplicity_index_bounds(&KnotRecord { braid_index: Some(1), ..rec() }).unwrap();
        assert_eq!(b.exact, Some(1));
        let clash = KnotRecord { braid_index: Some(1), is_trivial: Some(false), ..rec() };
        assert_eq!(
            multiplicity_index_bounds(&clash),
            Err(KnotError::Inconsistent {
                first: RuleId::TrivialIffOne,
                second: RuleId::AtMostBraidIndex,
                lower: 2,
                upper: 1
            })
        );
    }

    #[test]
    fn inconsistent_records_name_both_rules() {
        let r = KnotRecord { is_trivial: Some(true), trunk: Some(8), ..rec() };
        let err = multiplicity_index_bounds(&r).unwrap_err();
        assert!(matches!(err, KnotError::Inconsistent { .. }));
        let r = KnotRecord { torus_2p: Some(5), braid_index: Some(3), ..rec() };
        assert!(matches!(multiplicity_index_bounds(&r), Err(KnotError::Inconsistent { .. })));
    }

    #[test]
    fn rule_ids_match_serialization() {
        use RuleId::*;
        for r in [
            TrivialIffOne,
            TwoIffNontrivialTorus2p,
            ThreeIffBraidThreeOrTwoBridgeSum,
            MontesinosAtMostFour,
            AtMostBraidIndex,
            AtMostTwiceBridgeMinusOne,
            AtLeastHalfTrunk,
            AtMostTrunk,
            OneIffEqualUpToReversal,
            TwoIffTrivialOverNontrivialOrTwoCable,
            AtLeastTrunkRatio,
            TrunkExactForNoncompanionTarget,
        ] {
            assert_eq!(serde_json::to_value(r).unwrap(), r.id());
        }
    }

    #[test]
    fn field_validation() {
        assert!(matches!(
            multiplicity_index_bounds(&KnotRecord { torus_2p: Some(4), ..rec() }),
            Err(KnotError::InvalidField { field: "torus_2p", .. })
        ));
        assert!(matches!(
            multiplicity_index_bounds(&KnotRecord { torus_2p: Some(3), is_torus_2p: Some(false), ..rec() }),
            Err(KnotError::InvalidField { field: "is_torus_2p", .. })
        ));
        assert!(validate_record(&KnotRecord { trunk: Some(1), ..rec() }).is_err());
        assert!(serde_json::from_str::<KnotRecord>(r#"{"name":"x","colour":3}"#).is_err());
        let r: KnotRecord = serde_json::from_str(r#"{"name":"3_1","torus_2p":3}"#).unwrap();
        assert_eq!(r.torus_2p, Some(3));
    }

    #[test]
    fn pair_examples() {
        let eq = PairRelation { equal_up_to_reversal: Some(true), ..Default::default() };
        assert_eq!(pair_multiplicity_facts(&rec(), &rec(), &eq).unwrap().exact, Some(1));

        let nontrivial = KnotRecord { is_trivial: Some(false), ..rec() };
        let cable = PairRelation { k1_is_2cable_of_k2: Some(true), ..Default::default() };
        assert_eq!(pair_multiplicity_facts(&nontrivial, &rec(), &cable).unwrap().exact, Some(2));

        let k1 = KnotRecord { trunk: Some(6), ..rec() };
        let rel = PairRelation {
            equal_up_to_reversal: Some(false),
            k2_nontrivial: Some(true),
            k2_is_companion_of_k1: Some(false),
            ..Default::default()
        };
        assert_eq!(pair_multiplicity_facts(&k1, &rec(), &rel).unwrap().exact, Some(6));

        let trivial = KnotRecord { is_trivial: Some(true), ..rec() };
        let rel = PairRelation { k2_nontrivial: Some(true), ..Default::default() };
        assert_eq!(pair_multiplicity_facts(&trivial, &rec(), &rel).unwrap().exact, Some(2));

        let (a, b) = (KnotRecord { trunk: Some(12), ..rec() }, KnotRecord { trunk: Some(5), ..rec() });
        let r = pair_multiplicity_facts(&a, &b, &PairRelation::default()).unwrap();
        assert_eq!((r.lower, r.upper), (3, Upper::Finite(12)));
    }

    #[test]
    fn unknot_distance() {
        let d =
            distance_lower_bound_to_unknot(&KnotRecord { trunk: Some(4), is_trivial: Some(false), ..rec() }).unwrap();
        let UnknotDistance::AtLeast(d) = d else { panic!("{d:?}") };
        assert_eq!(d.product, MultValue::count(4));
        assert!((d.display_ln - 1.386).abs() < 1e-3);
        let d =
            distance_lower_bound_to_unknot(&KnotRecord { trunk: Some(2), is_trivial: Some(false), ..rec() }).unwrap();
        assert_eq!(d, UnknotDistance::AtLeast(DistValue::from_product(MultValue::count(2))));
        let d = distance_lower_bound_to_unknot(&KnotRecord { is_trivial: Some(true), ..rec() }).unwrap();
        assert!(matches!(d, UnknotDistance::Zero(v) if v.is_zero()));
        assert_eq!(distance_lower_bound_to_unknot(&rec()).unwrap(), UnknotDistance::InsufficientData);
    }

    #[test]
    fn unknot_distance_grows_with_trunk() {
        let mut last = 0.0;
        for t in [2, 4, 8, 16, 32] {
            let r = KnotRecord { trunk: Some(t), is_trivial: Some(false), ..rec() };
            let UnknotDistance::AtLeast(d) = distance_lower_bound_to_unknot(&r).unwrap() else { panic!() };
            assert!(d.display_ln > last);
            last = d.display_ln;
        }
    }

    pub(crate) fn arb_record() -> impl Strategy<Value = KnotRecord> {
        (
            proptest::option::of(any::<bool>()),
            proptest::option::of((-4i64..=4).prop_map(|k| 2 * k + 1)),
            proptest::option::of(any::<bool>()),
            proptest::option::of(1u64..=8),
            proptest::option::of(1u64..=6),
            proptest::option::of(2u64..=16),
            proptest::option::of(any::<bool>()),
            proptest::option::of(any::<bool>()),
        )
            .prop_map(|(t, p, ip, braid, bridge, trunk, mont, sum)| KnotRecord {
                name: String::new(),
                is_trivial: t,
                torus_2p: p,
                is_torus_2p: ip,
                braid_index: braid,
                bridge_index: bridge,
                trunk,
                is_montesinos: mont,
                is_connected_sum_of_2bridge: sum,
            })
    }

    proptest! {
        #[test]
        fn adding_an_assertion_never_widens(base in arb_record(), extra in arb_record(), field in 0usize..8) {
            let mut ext = base.clone();
            match field {
                0 => ext.is_trivial = ext.is_trivial.or(extra.is_trivial),
                1 => ext.torus_2p = ext.torus_2p.or(extra.torus_2p),
                2 => ext.is_torus_2p = ext.is_torus_2p.or(extra.is_torus_2p),
                3 => ext.braid_index = ext.braid_index.or(extra.braid_index),
                4 => ext.bridge_index = ext.bridge_index.or(extra.bridge_index),
                5 => ext.trunk = ext.trunk.or(extra.trunk),
                6 => ext.is_montesinos = ext.is_montesinos.or(extra.is_montesinos),
                _ => ext.is_connected_sum_of_2bridge = ext.is_connected_sum_of_2bridge.or(extra.is_connected_sum_of_2bridge),
            }
            if validate_record(&base).is_ok() && validate_record(&ext).is_ok() {
                match (multiplicity_index_bounds(&base), multiplicity_index_bounds(&ext)) {
                    (Ok(b), Ok(e)) => prop_assert!(e.is_within(&b), "{b:?} vs {e:?}"),
                    (Err(_), Ok(e)) => prop_assert!(false, "extension repaired an inconsistency: {e:?}"),
                    _ => {}
                }
            }
        }

        #[test]
        fn direct_bounds_hold(r in arb_record()) {
            if let Ok(b) = multiplicity_index_bounds(&r) {
                let mut cap = u64::MAX;
                if let Some(x) = r.braid_index { cap = cap.min(x); }
                if let Some(x) = r.bridge_index { cap = cap.min(2 * x - 1); }
                prop_assert!(b.upper <= Upper::Finite(cap) || cap == u64::MAX);
                if let Some(t) = r.trunk {
                    prop_assert!(b.lower >= t.div_ceil(2));
                }
            }
        }
    }
}
