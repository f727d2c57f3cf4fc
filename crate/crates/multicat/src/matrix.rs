//! Pairwise distance matrices over a corpus, with a metric audit.

use std::sync::Arc;

use multicat_core::finset::finset_multiplicity;
use multicat_core::group::{group_multiplicities, is_isomorphic, FiniteGroup};
use multicat_core::module::FgZModule;
use multicat_core::{mult_product, Certificate, DistValue, MultValue, Violation, ViolationKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::parallel::rank_multiplicities_parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Kernel,
    Cokernel,
}

pub enum Corpus {
    Sets(Vec<usize>),
    Groups(Vec<(String, Arc<FiniteGroup>)>),
    Modules(Vec<FgZModule>),
}

impl Corpus {
    pub fn labels(&self) -> Vec<String> {
        match self {
            Corpus::Sets(v) => v.iter().map(|n| n.to_string()).collect(),
            Corpus::Groups(v) => v.iter().map(|(name, _)| name.clone()).collect(),
            Corpus::Modules(v) => v.iter().map(|m| m.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Corpus::Sets(v) => v.len(),
            Corpus::Groups(v) => v.len(),
            Corpus::Modules(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn isomorphic(&self, i: usize, j: usize) -> bool {
        match self {
            Corpus::Sets(v) => v[i] == v[j],
            Corpus::Groups(v) => is_isomorphic(&v[i].1, &v[j].1),
            Corpus::Modules(v) => v[i] == v[j],
        }
    }

    /// `m(#i : #j)`.
    fn directed(&self, i: usize, j: usize, measure: Measure, bound: u64, limit: u128) -> (MultValue, Certificate) {
        match self {
            Corpus::Sets(v) => {
                let m = finset_multiplicity(v[i], v[j]).expect("sizes validated on input");
                (m.value, m.certificate)
            }
            Corpus::Groups(v) => {
                let r = group_multiplicities(&v[i].1, &v[j].1);
                let m = match measure {
                    Measure::Kernel => r.m_ker,
                    Measure::Cokernel => r.m_coker,
                };
                (m.value, m.certificate)
            }
            Corpus::Modules(v) => {
                let r = rank_multiplicities_parallel(&v[i], &v[j], bound, limit);
                let m = match measure {
                    Measure::Kernel => r.m_rker,
                    Measure::Cokernel => r.m_rcoker,
                };
                (m.value, m.certificate)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    #[serde(flatten)]
    pub distance: DistValue,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricAudit {
    pub symmetric: bool,
    pub zero_diagonal: bool,
    pub triangle: bool,
    pub triangles_checked: usize,
    /// Triples skipped because a cell is only an upper bound.
    pub triangles_skipped: usize,
    pub zero_iff_isomorphic: bool,
    pub flagged_cells: Vec<(usize, usize)>,
    pub violations: Vec<Violation>,
}

impl MetricAudit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    pub cells: Vec<Vec<Cell>>,
    pub audit: MetricAudit,
}

/// Computes every ordered multiplicity in parallel, then assembles and
/// audits the matrix on the calling thread.
pub fn distance_matrix(corpus: &Corpus, measure: Measure, bound: u64, limit: u128) -> DistanceMatrix {
    let n = corpus.len();
    let directed: Vec<(MultValue, Certificate)> =
        (0..n * n).into_par_iter().map(|k| corpus.directed(k / n, k % n, measure, bound, limit)).collect();
    let at = |i: usize, j: usize| directed[i * n + j];
    let cells: Vec<Vec<Cell>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let ((a, ca), (b, cb)) = (at(i, j), at(j, i));
                    Cell {
                        distance: DistValue::from_pair(a, b).expect("one family per corpus"),
                        certificate: ca.meet(cb),
                    }
                })
                .collect()
        })
        .collect();
    let audit = audit(corpus, &cells);
    DistanceMatrix { labels: corpus.labels(), cells, audit }
}

fn audit(corpus: &Corpus, cells: &[Vec<Cell>]) -> MetricAudit {
    let n = cells.len();
    let labels = corpus.labels();
    let exact = |i: usize, j: usize| cells[i][j].certificate == Certificate::Exact;
    let product = |i: usize, j: usize| cells[i][j].distance.product;
    let mut violations = Vec::new();
    let mut flagged_cells = Vec::new();
    let (mut symmetric, mut zero_diagonal, mut zero_iff) = (true, true, true);
    for i in 0..n {
        if !product(i, i).is_one() {
            zero_diagonal = false;
            violations.push(Violation {
                kind: ViolationKind::SelfDistance,
                detail: format!("d({0}, {0}) has product {1}", labels[i], product(i, i)),
            });
        }
        for j in 0..n {
            if !exact(i, j) {
                flagged_cells.push((i, j));
            }
            if product(i, j) != product(j, i) {
                symmetric = false;
                violations.push(Violation {
                    kind: ViolationKind::Symmetry,
                    detail: format!("d({}, {}) differs from its transpose", labels[i], labels[j]),
                });
            }
            if i < j && exact(i, j) && product(i, j).is_one() != corpus.isomorphic(i, j) {
                zero_iff = false;
                violations.push(Violation {
                    kind: ViolationKind::SelfDistance,
                    detail: format!(
                        "d({}, {}) = {} but the objects are {}isomorphic",
                        labels[i],
                        labels[j],
                        product(i, j),
                        if product(i, j).is_one() { "not " } else { "" }
                    ),
                });
            }
        }
    }
    let (mut checked, mut skipped, mut triangle) = (0, 0, true);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if !(exact(a, b) && exact(b, c) && exact(a, c)) {
                    skipped += 1;
                    continue;
                }
                checked += 1;
                let bound = mult_product(product(a, b), product(b, c)).expect("one family per corpus");
                if product(a, c).partial_cmp(&bound).is_none_or(|o| o.is_gt()) {
                    triangle = false;
                    violations.push(Violation {
                        kind: ViolationKind::Triangle,
                        detail: format!(
                            "d({}, {}) = ln {} exceeds ln {} via {}",
                            labels[a],
                            labels[c],
                            product(a, c),
                            bound,
                            labels[b]
                        ),
                    });
                }
            }
        }
    }
    MetricAudit {
        symmetric,
        zero_diagonal,
        triangle,
        triangles_checked: checked,
        triangles_skipped: skipped,
        zero_iff_isomorphic: zero_iff,
        flagged_cells,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use multicat_core::module::{parse_module, DEFAULT_CANDIDATE_LIMIT};

    fn group(name: &str) -> (String, Arc<FiniteGroup>) {
        (name.to_string(), Arc::new(crate::formats::named_group(name).unwrap()))
    }

    #[test]
    fn small_group_matrix() {
        let corpus = Corpus::Groups(["cyclic:2", "cyclic:3", "cyclic:4", "klein4"].map(group).to_vec());
        let m = distance_matrix(&corpus, Measure::Kernel, 1, DEFAULT_CANDIDATE_LIMIT);
        assert!(m.audit.passed(), "{:?}", m.audit.violations);
        assert_eq!(m.audit.triangles_checked, 64);
        // Z/4 -> Z/2 has kernel 2 and Z/2 -> Z/4 is injective
        assert_eq!(m.cells[0][2].distance.product, MultValue::count(2));
        // Z/2 and Z/3 only meet through the trivial hom
        assert_eq!(m.cells[0][1].distance.product, MultValue::count(6));
        for i in 0..4 {
            assert!(m.cells[i][i].distance.is_zero());
        }
    }

    #[test]
    fn free_module_matrix() {
        let corpus = Corpus::Modules(["Z", "Z^2", "Z^3"].map(|s| parse_module(s).unwrap()).to_vec());
        let m = distance_matrix(&corpus, Measure::Kernel, 2, DEFAULT_CANDIDATE_LIMIT);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.cells[i][j].distance.product, MultValue::Exp(i.abs_diff(j) as u32));
            }
        }
        assert!(m.audit.passed());
    }

    #[test]
    fn single_object() {
        let m = distance_matrix(&Corpus::Sets(vec![5]), Measure::Kernel, 1, 1);
        assert_eq!(m.cells.len(), 1);
        assert!(m.cells[0][0].distance.is_zero());
    }

    #[test]
    fn set_sizes() {
        let m = distance_matrix(&Corpus::Sets(vec![1, 2, 3, 7]), Measure::Kernel, 1, 1);
        assert!(m.audit.passed());
        assert_eq!(m.cells[3][1].distance.product, MultValue::count(4));
    }
}
