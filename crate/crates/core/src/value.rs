use core::cmp::Ordering;
use core::fmt;
use core::num::NonZeroU64;

use serde::{Deserialize, Serialize};

/// The two discrete value ranges a multiplicity can live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Positive integers `1, 2, 3, ...`.
    Count,
    /// Powers `e^0, e^1, e^2, ...`.
    Exp,
}

/// An exact multiplicity value.
///
/// Values from different families are never multiplied together; comparing
/// them yields `None`. `Infinity` belongs to both families and is larger
/// than everything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultValue {
    Count(NonZeroU64),
    /// `e^n`, stored as the exponent `n`.
    Exp(u32),
    Infinity,
}

impl MultValue {
    /// `Count(k)`.
    ///
    /// # Panics
    ///
    /// Panics if `k == 0`.
    pub const fn count(k: u64) -> Self {
        match NonZeroU64::new(k) {
            Some(k) => MultValue::Count(k),
            None => panic!("Count multiplicity must be at least 1"),
        }
    }

    pub const fn one(family: Family) -> Self {
        match family {
            Family::Count => MultValue::count(1),
            Family::Exp => MultValue::Exp(0),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, MultValue::Count(k) if k.get() == 1) || matches!(self, MultValue::Exp(0))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, MultValue::Infinity)
    }

    /// Family of a finite value; `None` for `Infinity`.
    pub fn family(&self) -> Option<Family> {
        match self {
            MultValue::Count(_) => Some(Family::Count),
            MultValue::Exp(_) => Some(Family::Exp),
            MultValue::Infinity => None,
        }
    }

    pub fn as_count(&self) -> Option<u64> {
        match self {
            MultValue::Count(k) => Some(k.get()),
            _ => None,
        }
    }

    pub fn as_exp(&self) -> Option<u32> {
        match self {
            MultValue::Exp(n) => Some(*n),
            _ => None,
        }
    }

    /// Natural logarithm of the numeric value.
    pub fn ln(&self) -> f64 {
        match self {
            MultValue::Count(k) => libm::log(k.get() as f64),
            MultValue::Exp(n) => f64::from(*n),
            MultValue::Infinity => f64::INFINITY,
        }
    }
}

impl PartialOrd for MultValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use MultValue::*;
        match (self, other) {
            (Infinity, Infinity) => Some(Ordering::Equal),
            (Infinity, _) => Some(Ordering::Greater),
            (_, Infinity) => Some(Ordering::Less),
            (Count(a), Count(b)) => Some(a.cmp(b)),
            (Exp(a), Exp(b)) => Some(a.cmp(b)),
            _ => None,
        }
    }
}

impl fmt::Display for MultValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MultValue::Count(k) => write!(f, "{k}"),
            MultValue::Exp(0) => f.write_str("1"),
            MultValue::Exp(1) => f.write_str("e"),
            MultValue::Exp(n) => write!(f, "e^{n}"),
            MultValue::Infinity => f.write_str("∞"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MultError {
    #[error("cannot combine multiplicities from different families: {0} and {1}")]
    FamilyMismatch(MultValue, MultValue),
    #[error("multiplicity product overflows: {0} * {1}")]
    Overflow(MultValue, MultValue),
}

/// Exact product of two multiplicities.
///
/// `Count` multiplies, `Exp` adds exponents, and anything times `Infinity` is
/// `Infinity`. Mixing `Count` with `Exp` is an error.
pub fn mult_product(a: MultValue, b: MultValue) -> Result<MultValue, MultError> {
    use MultValue::*;
    match (a, b) {
        (Infinity, _) | (_, Infinity) => Ok(Infinity),
        (Count(x), Count(y)) => x.checked_mul(y).map(Count).ok_or(MultError::Overflow(a, b)),
        (Exp(x), Exp(y)) => x.checked_add(y).map(Exp).ok_or(MultError::Overflow(a, b)),
        _ => Err(MultError::FamilyMismatch(a, b)),
    }
}

/// Whether a minimized value is proven optimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Exact,
    UpperBound,
}

impl Certificate {
    /// The weaker of two certificates.
    pub fn meet(self, other: Certificate) -> Certificate {
        if self == Certificate::Exact && other == Certificate::Exact {
            Certificate::Exact
        } else {
            Certificate::UpperBound
        }
    }
}

/// A minimized multiplicity together with the morphism attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessedMultiplicity<W> {
    pub value: MultValue,
    pub witness: Option<W>,
    pub certificate: Certificate,
}

impl<W> WitnessedMultiplicity<W> {
    pub fn map_witness<V>(self, f: impl FnOnce(W) -> V) -> WitnessedMultiplicity<V> {
        WitnessedMultiplicity { value: self.value, witness: self.witness.map(f), certificate: self.certificate }
    }
}

/// A multiplicity distance `ln(m(X:Y) m(Y:X))`, kept as the exact product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistValue {
    pub product: MultValue,
    /// `ln(product)`; presentation only.
    pub display_ln: f64,
}

impl DistValue {
    pub fn from_product(product: MultValue) -> Self {
        DistValue { product, display_ln: product.ln() }
    }

    pub fn from_pair(a: MultValue, b: MultValue) -> Result<Self, MultError> {
        mult_product(a, b).map(Self::from_product)
    }

    /// Decided on the exact product.
    pub fn is_zero(&self) -> bool {
        self.product.is_one()
    }
}
