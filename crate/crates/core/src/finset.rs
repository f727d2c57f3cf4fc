//! Non-empty finite sets and maps, measured by the largest fiber.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::category::{Category, Search};
use crate::value::{Certificate, Family, MultValue, WitnessedMultiplicity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum FinSetError {
    #[error("finite sets must be non-empty")]
    EmptySet,
    #[error("map entry {index} = {value} is outside the codomain of size {codomain}")]
    OutOfRange { index: usize, value: usize, codomain: usize },
}

/// Cardinality of a non-empty finite set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SetSize(usize);

impl SetSize {
    pub fn new(n: usize) -> Result<Self, FinSetError> {
        if n == 0 {
            Err(FinSetError::EmptySet)
        } else {
            Ok(SetSize(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

/// A map `{0..domain} -> {0..codomain}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinMap {
    codomain: usize,
    images: Vec<usize>,
}

impl FinMap {
    pub fn new(images: Vec<usize>, codomain: SetSize) -> Result<Self, FinSetError> {
        if images.is_empty() {
            return Err(FinSetError::EmptySet);
        }
        if let Some((index, &value)) = images.iter().enumerate().find(|(_, &v)| v >= codomain.0) {
            return Err(FinSetError::OutOfRange { index, value, codomain: codomain.0 });
        }
        Ok(FinMap { codomain: codomain.0, images })
    }

    pub fn identity(size: SetSize) -> Self {
        FinMap { codomain: size.0, images: (0..size.0).collect() }
    }

    pub fn domain(&self) -> usize {
        self.images.len()
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &FinMap) -> Option<FinMap> {
        (self.codomain == g.domain())
            .then(|| FinMap { codomain: g.codomain, images: self.images.iter().map(|&x| g.images[x]).collect() })
    }

    /// Largest fiber `max_y |f⁻¹(y)|`.
    pub fn max_fiber(&self) -> usize {
        let mut fibers = alloc::vec![0usize; self.codomain];
        for &y in &self.images {
            fibers[y] += 1;
        }
        fibers.into_iter().max().unwrap_or(0)
    }
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// Block map sending consecutive runs of `⌈x/y⌉` domain elements to the same point.
fn block_map(x: SetSize, y: SetSize) -> FinMap {
    let block = ceil_div(x.0, y.0);
    FinMap { codomain: y.0, images: (0..x.0).map(|i| i / block).collect() }
}

/// `m(X:Y) = ⌈|X|/|Y|⌉` with a block-assignment witness.
pub fn finset_multiplicity(x_size: usize, y_size: usize) -> Result<WitnessedMultiplicity<FinMap>, FinSetError> {
    let (x, y) = (SetSize::new(x_size)?, SetSize::new(y_size)?);
    let witness = block_map(x, y);
    debug_assert_eq!(witness.max_fiber(), ceil_div(x_size, y_size));
    Ok(WitnessedMultiplicity {
        value: MultValue::count(ceil_div(x_size, y_size) as u64),
        witness: Some(witness),
        certificate: Certificate::Exact,
    })
}

/// The category of non-empty finite sets with the map-multiplicity.
///
/// The default search proposes only the block map and relies on the
/// pigeonhole bound for exactness; [`FinSets::exhaustive`] walks all `|Y|^|X|`
/// maps instead.
#[derive(Debug, Clone, Copy, Default)]
pub struct FinSets {
    exhaustive: bool,
}

impl FinSets {
    pub fn new() -> Self {
        FinSets { exhaustive: false }
    }

    pub fn exhaustive() -> Self {
        FinSets { exhaustive: true }
    }
}

/// Every map `{0..x} -> {0..y}` in lexicographic order.
pub fn all_maps(x: SetSize, y: SetSize) -> impl Iterator<Item = FinMap> {
    let mut next = Some(alloc::vec![0usize; x.0]);
    core::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        for pos in (0..succ.len()).rev() {
            succ[pos] += 1;
            if succ[pos] < y.0 {
                next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(FinMap { codomain: y.0, images: current })
    })
}

impl Category for FinSets {
    type Object = SetSize;
    type Morphism = FinMap;

    fn family(&self) -> Family {
        Family::Count
    }

    fn identity(&self, x: &SetSize) -> FinMap {
        FinMap::identity(*x)
    }

    fn compose(&self, f: &FinMap, g: &FinMap) -> Option<FinMap> {
        f.then(g)
    }

    fn multiplicity(&self, f: &FinMap) -> MultValue {
        MultValue::count(f.max_fiber() as u64)
    }

    fn search<'a>(&'a self, x: &'a SetSize, y: &'a SetSize) -> Search<'a, FinMap> {
        if self.exhaustive {
            Search::exhaustive(all_maps(*x, *y).map(|f| {
                let m = MultValue::count(f.max_fiber() as u64);
                (f, m)
            }))
        } else {
            let f = block_map(*x, *y);
            let m = MultValue::count(f.max_fiber() as u64);
            Search::partial(core::iter::once((f, m)))
        }
    }

    /// Pigeonhole: some fiber has at least `⌈|X|/|Y|⌉` points.
    fn lower_bound(&self, x: &SetSize, y: &SetSize) -> Option<MultValue> {
        Some(MultValue::count(ceil_div(x.0, y.0) as u64))
    }
}
