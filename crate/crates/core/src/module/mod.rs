//! Finitely generated ℤ-modules, their homomorphisms, and the kernel-rank and
//! cokernel-rank multiplicities.

mod hom;
mod snf;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Serialize, Serializer};

pub use hom::{
    default_bound, finish_rank_search, rank_distances, rank_floors, rank_multiplicities, rank_multiplicities_limited,
    search_ranks, HomSpace, ModuleCategory, ModuleHomError, RankDistances, RankMeasure, RankMultiplicities, RankSearch,
    ZModuleHom, DEFAULT_CANDIDATE_LIMIT,
};
pub use snf::{smith_normal_form, IntMatrix, SnfResult};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModuleError {
    #[error("invariant factor {0} must be at least 2")]
    FactorTooSmall(BigInt),
    #[error("invariant factors {0} and {1} do not form a divisibility chain")]
    NotAChain(BigInt, BigInt),
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

fn parse_error(position: usize, message: impl Into<String>) -> ModuleError {
    ModuleError::Parse { position, message: message.into() }
}

/// `ℤ^free_rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with `2 <= d₁ | d₂ | … | d_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FgZModule {
    free_rank: usize,
    invariant_factors: Vec<BigInt>,
}

impl Serialize for FgZModule {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl FgZModule {
    pub fn new(free_rank: usize, invariant_factors: Vec<BigInt>) -> Result<Self, ModuleError> {
        if let Some(d) = invariant_factors.iter().find(|d| *d < &BigInt::from(2)) {
            return Err(ModuleError::FactorTooSmall(d.clone()));
        }
        if let Some(w) = invariant_factors.windows(2).find(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(ModuleError::NotAChain(w[0].clone(), w[1].clone()));
        }
        Ok(FgZModule { free_rank, invariant_factors })
    }

    pub fn zero() -> Self {
        FgZModule { free_rank: 0, invariant_factors: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        FgZModule { free_rank: rank, invariant_factors: Vec::new() }
    }

    /// Normal form of `ℤ^free_rank ⊕ ⊕ᵢ ℤ/cᵢ` for arbitrary `cᵢ >= 1`.
    ///
    /// Pairs are replaced by `(gcd, lcm)`, which preserves the isomorphism
    /// type, until the list is a divisibility chain.
    pub fn from_cyclic(free_rank: usize, orders: impl IntoIterator<Item = BigInt>) -> Result<Self, ModuleError> {
        let mut c: Vec<BigInt> = orders.into_iter().collect();
        if let Some(d) = c.iter().find(|d| !d.is_positive()) {
            return Err(ModuleError::FactorTooSmall(d.clone()));
        }
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let (g, l) = (c[i].gcd(&c[j]), c[i].lcm(&c[j]));
                c[i] = g;
                c[j] = l;
            }
        }
        c.retain(|d| !d.is_one());
        FgZModule::new(free_rank, c)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_torsion(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_free(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.is_torsion() && self.is_free()
    }

    /// Cardinality of a torsion module; `None` if there is a free part.
    pub fn order(&self) -> Option<BigInt> {
        self.is_torsion().then(|| self.invariant_factors.iter().product())
    }

    /// Number of generators of the presentation (`free_rank + k`).
    pub fn generator_count(&self) -> usize {
        self.free_rank + self.invariant_factors.len()
    }

    /// Invariant factors as machine integers, when they all fit.
    pub fn small_factors(&self) -> Option<Vec<u64>> {
        self.invariant_factors.iter().map(ToPrimitive::to_u64).collect()
    }
}

/// `r(M)`, the minimal number of generators.
pub fn min_generators(m: &FgZModule) -> usize {
    m.generator_count()
}

/// `tor(M)`.
pub fn torsion_submodule(m: &FgZModule) -> FgZModule {
    FgZModule { free_rank: 0, invariant_factors: m.invariant_factors.clone() }
}

impl fmt::Display for FgZModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut parts: Vec<String> = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(alloc::format!("Z^{r}")),
        }
        parts.extend(self.invariant_factors.iter().map(|d| alloc::format!("Z/{d}")));
        f.write_str(&parts.join(" + "))
    }
}

impl core::str::FromStr for FgZModule {
    type Err = ModuleError;

    fn from_str(s: &str) -> Result<Self, ModuleError> {
        parse_module(s)
    }
}

/// Parses `term ('+' term)*` with `term ::= Z | Z^k | Z/d | 0`, `k >= 1`, `d >= 2`.
pub fn parse_module(text: &str) -> Result<FgZModule, ModuleError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let number = |pos: &mut usize| -> Result<BigInt, ModuleError> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if start == *pos {
            return Err(parse_error(start, "expected a number"));
        }
        BigInt::parse_bytes(&bytes[start..*pos], 10).ok_or_else(|| parse_error(start, "bad number"))
    };

    let mut free_rank = 0usize;
    let mut orders = Vec::new();
    loop {
        skip_ws(&mut pos);
        let start = pos;
        match bytes.get(pos) {
            Some(b'0') => pos += 1,
            Some(b'Z') => {
                pos += 1;
                match bytes.get(pos) {
                    Some(b'^') => {
                        pos += 1;
                        let k = number(&mut pos)?;
                        let k = k
                            .to_usize()
                            .filter(|&k| k >= 1)
                            .ok_or_else(|| parse_error(start, "rank must be a positive integer"))?;
                        free_rank = free_rank.checked_add(k).ok_or_else(|| parse_error(start, "rank too large"))?;
                    }
                    Some(b'/') => {
                        pos += 1;
                        let at = pos;
                        let d = number(&mut pos)?;
                        if d < BigInt::from(2) {
                            return Err(parse_error(at, alloc::format!("cyclic order must be at least 2, got {d}")));
                        }
                        orders.push(d);
                    }
                    _ => free_rank += 1,
                }
            }
            Some(c) => return Err(parse_error(pos, alloc::format!("unexpected '{}'", *c as char))),
            None => return Err(parse_error(pos, "expected a summand")),
        }
        skip_ws(&mut pos);
        match bytes.get(pos) {
            None => break,
            Some(b'+') => pos += 1,
            Some(c) => return Err(parse_error(pos, alloc::format!("expected '+', found '{}'", *c as char))),
        }
    }
    FgZModule::from_cyclic(free_rank, orders)
}

/// Every torsion module of order at most `max_order`, by invariant factors.
pub fn torsion_modules(max_order: u64) -> Vec<FgZModule> {
    // Chains d₁ | … | d_k with product n.
    fn chains(n: u64, min: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if n == 1 {
            out.push(prefix.clone());
            return;
        }
        for d in (2..=n).filter(|d| d % min == 0 && n.is_multiple_of(*d)) {
            let rest = n / d;
            if rest == 1 || rest.is_multiple_of(d) {
                prefix.push(d);
                chains(rest, d, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    for n in 1..=max_order {
        let mut found = Vec::new();
        chains(n, 1, &mut Vec::new(), &mut found);
        for c in found {
            out.push(FgZModule { free_rank: 0, invariant_factors: c.into_iter().map(BigInt::from).collect() });
        }
    }
    out
}

impl FgZModule {
    /// Nonnegative residue of `x` modulo invariant factor `j`.
    pub(crate) fn reduce(&self, j: usize, x: &BigInt) -> BigInt {
        x.mod_floor(&self.invariant_factors[j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn parsing_examples() {
        assert_eq!(parse_module("Z^2 + Z/4").unwrap(), FgZModule::new(2, vec![b(4)]).unwrap());
        assert_eq!(parse_module("Z/2 + Z/3").unwrap(), FgZModule::new(0, vec![b(6)]).unwrap());
        assert_eq!(parse_module("Z/2+Z/4").unwrap(), FgZModule::new(0, vec![b(2), b(4)]).unwrap());
        assert_eq!(parse_module("0").unwrap(), FgZModule::zero());
        assert_eq!(parse_module(" Z + Z + 0 ").unwrap(), FgZModule::free(2));
        assert_eq!(parse_module("Z/4 + Z/6 + Z/10").unwrap(), FgZModule::new(0, vec![b(2), b(2), b(60)]).unwrap());
        let big = parse_module("Z/340282366920938463463374607431768211457").unwrap();
        assert_eq!(big.invariant_factors().len(), 1);
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            parse_module("Z + Z/1"),
            Err(ModuleError::Parse { position: 6, message: "cyclic order must be at least 2, got 1".into() })
        );
        assert!(matches!(parse_module("Z +"), Err(ModuleError::Parse { position: 3, .. })));
        assert!(matches!(parse_module("Q"), Err(ModuleError::Parse { position: 0, .. })));
        assert!(matches!(parse_module("Z^0"), Err(ModuleError::Parse { position: 0, .. })));
        assert!(matches!(parse_module("Z Z"), Err(ModuleError::Parse { position: 2, .. })));
    }

    #[test]
    fn display_round_trips() {
        for text in ["0", "Z", "Z^3 + Z/2 + Z/4", "Z/12"] {
            assert_eq!(parse_module(text).unwrap().to_string(), text);
        }
    }

    #[test]
    fn generators_and_torsion() {
        assert_eq!(min_generators(&FgZModule::free(3)), 3);
        assert_eq!(min_generators(&FgZModule::zero()), 0);
        assert_eq!(min_generators(&parse_module("Z/2 + Z/4").unwrap()), 2);
        assert_eq!(torsion_submodule(&parse_module("Z^2 + Z/6").unwrap()), parse_module("Z/6").unwrap());
        assert_eq!(torsion_submodule(&FgZModule::free(3)), FgZModule::zero());
        let t = parse_module("Z/2 + Z/4").unwrap();
        assert_eq!(torsion_submodule(&t), t);
    }

    #[test]
    fn validation() {
        assert!(matches!(FgZModule::new(0, vec![b(1)]), Err(ModuleError::FactorTooSmall(_))));
        assert!(matches!(FgZModule::new(0, vec![b(4), b(6)]), Err(ModuleError::NotAChain(..))));
    }

    #[test]
    fn torsion_corpus() {
        let corpus = torsion_modules(16);
        assert_eq!(corpus.len(), 1 + 1 + 1 + 2 + 1 + 1 + 1 + 3 + 2 + 1 + 1 + 2 + 1 + 1 + 1 + 5);
        assert_eq!(corpus[0], FgZModule::zero());
        for m in &corpus {
            assert!(FgZModule::new(0, m.invariant_factors().to_vec()).is_ok());
        }
    }
}
