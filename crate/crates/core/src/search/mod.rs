//! Min-homogeneous subsets of pair colorings.
//!
//! A set is min-homogeneous when, for each of its elements `x`, every pair
//! `(x, y)` with `y` a later element of the set has the same color. Equivalently
//! every row of the coloring restricted to the set is constant.

mod cnf;
mod nu;

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::coloring::Construction;
use crate::hierarchy::HierarchyIndex;

pub use cnf::{export_cnf, CnfDocument, CnfVariable, MAX_CNF_CLAUSES};
pub use nu::{
    nu_decision, nu_decision_exhaustive, nu_value, CanonicalColorings, ForcedStats, NuCertificate, NuSearchOptions,
    NuValue, NuVerdict, RowPartitions, DEFAULT_NODE_LIMIT, MAX_NU_DOMAIN,
};

/// Upper limit on subsets [`brute_force_max`] is willing to enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 2_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("domain must be strictly increasing")]
    UnsortedDomain,
    #[error("{0} is not in the domain")]
    NotInDomain(u64),
    #[error("a pair needs two distinct points, got {0} twice")]
    DegeneratePair(u64),
    #[error("row of {row} has {got} colors, expected {expected}")]
    RowLength { row: u64, got: usize, expected: usize },
    #[error("brute force would enumerate {subsets} subsets (limit {limit})")]
    TooManySubsets { subsets: u128, limit: u128 },
    #[error("search exceeded its node limit of {limit}")]
    NodeLimit { limit: u64 },
    #[error("domain size {n} exceeds the supported maximum {max}")]
    DomainTooLarge { n: u64, max: u64 },
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("CNF would have {clauses} clauses (limit {limit})")]
    CnfTooLarge { clauses: u128, limit: u128 },
    #[error("malformed DIMACS input: {0}")]
    Dimacs(String),
    #[error("assignment does not decode to a coloring: {0}")]
    Decode(String),
}

/// A coloring of the pairs of a finite, strictly increasing domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairColoring {
    domain: Vec<u64>,
    /// Upper triangle, row-major: pair `(i, j)` with `i < j` at `offset(i) + j - i - 1`.
    colors: Vec<u64>,
}

impl PairColoring {
    pub fn from_fn(domain: Vec<u64>, mut color: impl FnMut(u64, u64) -> u64) -> Result<Self, SearchError> {
        if domain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SearchError::UnsortedDomain);
        }
        let n = domain.len();
        let mut colors = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for (i, &x) in domain.iter().enumerate() {
            for &y in &domain[i + 1..] {
                colors.push(color(x, y));
            }
        }
        Ok(PairColoring { domain, colors })
    }

    /// Builds a coloring from its rows: `rows[i]` lists the colors of
    /// `(domain[i], domain[j])` for `j = i+1, i+2, ...`.
    pub fn from_rows(domain: Vec<u64>, rows: &[Vec<u64>]) -> Result<Self, SearchError> {
        let n = domain.len();
        for (i, &x) in domain.iter().enumerate() {
            let expected = n - i - 1;
            let got = rows.get(i).map_or(0, Vec::len);
            if got != expected {
                return Err(SearchError::RowLength { row: x, got, expected });
            }
        }
        PairColoring::from_fn(domain.clone(), |x, y| {
            let i = domain.binary_search(&x).unwrap();
            let j = domain.binary_search(&y).unwrap();
            rows[i][j - i - 1]
        })
    }

    pub fn domain(&self) -> &[u64] {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    fn offset(&self, i: usize) -> usize {
        let n = self.domain.len();
        i * n - i * (i + 1) / 2
    }

    /// Color of the pair at domain positions `i < j`.
    pub fn color_at(&self, i: usize, j: usize) -> u64 {
        debug_assert!(i < j && j < self.domain.len());
        self.colors[self.offset(i) + j - i - 1]
    }

    pub fn index_of(&self, x: u64) -> Result<usize, SearchError> {
        self.domain.binary_search(&x).map_err(|_| SearchError::NotInDomain(x))
    }

    /// Color of the unordered pair `{m, n}`.
    pub fn color(&self, m: u64, n: u64) -> Result<u64, SearchError> {
        if m == n {
            return Err(SearchError::DegeneratePair(m));
        }
        let (i, j) = (self.index_of(m.min(n))?, self.index_of(m.max(n))?);
        Ok(self.color_at(i, j))
    }

    /// The first pair `(m, n, color)` with `color >= m`, if any.
    pub fn regressive_violation(&self) -> Option<(u64, u64, u64)> {
        let n = self.domain.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (self.domain[i], self.domain[j], self.color_at(i, j)))
            .find(|&(m, _, c)| c >= m)
    }

    pub fn is_regressive(&self) -> bool {
        self.regressive_violation().is_none()
    }

    /// The color classes of row `i`: for each distinct color, the bitset of
    /// positions `j > i` carrying it, in order of first appearance.
    #[allow(clippy::needless_range_loop)]
    fn row_classes(&self, i: usize) -> (Vec<FixedBitSet>, Vec<usize>) {
        let n = self.domain.len();
        let mut seen: Vec<u64> = Vec::new();
        let mut classes: Vec<FixedBitSet> = Vec::new();
        let mut class_of = vec![usize::MAX; n];
        for j in i + 1..n {
            let c = self.color_at(i, j);
            let id = match seen.iter().position(|&s| s == c) {
                Some(id) => id,
                None => {
                    seen.push(c);
                    classes.push(FixedBitSet::with_capacity(n));
                    seen.len() - 1
                }
            };
            classes[id].insert(j);
            class_of[j] = id;
        }
        (classes, class_of)
    }

    fn positions(&self, s: &[u64]) -> Result<Vec<usize>, SearchError> {
        let mut idx = s.iter().map(|&x| self.index_of(x)).collect::<Result<Vec<_>, _>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }
}

/// A min-homogeneous set with the common color of each of its rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinHomogWitness {
    pub elements: Vec<u64>,
    /// Row color of every element except the largest.
    pub row_colors: BTreeMap<u64, u64>,
}

impl MinHomogWitness {
    fn from_positions(c: &PairColoring, idx: &[usize]) -> Self {
        let elements = idx.iter().map(|&i| c.domain[i]).collect();
        let row_colors = idx.windows(2).map(|w| (c.domain[w[0]], c.color_at(w[0], w[1]))).collect();
        MinHomogWitness { elements, row_colors }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Rechecks every pair of the witness against `c`.
    pub fn verify(&self, c: &PairColoring) -> bool {
        if self.elements.windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
        if self.row_colors.len() != self.elements.len().saturating_sub(1) {
            return false;
        }
        self.elements.iter().enumerate().all(|(a, &x)| {
            self.elements[a + 1..].iter().all(|&y| match (c.color(x, y), self.row_colors.get(&x)) {
                (Ok(col), Some(&row)) => col == row,
                _ => false,
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub max_size: usize,
    /// Lexicographically least min-homogeneous set of size `max_size`.
    pub witness: MinHomogWitness,
    pub nodes_explored: u64,
}

fn positions_min_homogeneous(c: &PairColoring, idx: &[usize]) -> bool {
    idx.iter().enumerate().all(|(a, &i)| match idx.get(a + 1) {
        Some(&next) => {
            let row = c.color_at(i, next);
            idx[a + 2..].iter().all(|&j| c.color_at(i, j) == row)
        }
        None => true,
    })
}

/// Whether `s` (taken as a set) is min-homogeneous for `c`.
pub fn is_min_homogeneous(c: &PairColoring, s: &[u64]) -> Result<bool, SearchError> {
    Ok(positions_min_homogeneous(c, &c.positions(s)?))
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Largest min-homogeneous subset of size at most `cap`, by enumerating
/// every subset from size `cap` downwards in lexicographic order.
pub fn brute_force_max(c: &PairColoring, cap: usize) -> Result<SearchOutcome, SearchError> {
    let n = c.len();
    let cap = cap.min(n);
    let total: u128 = (0..=cap).map(|s| binomial(n as u128, s as u128)).fold(0, u128::saturating_add);
    if total > BRUTE_FORCE_LIMIT {
        return Err(SearchError::TooManySubsets { subsets: total, limit: BRUTE_FORCE_LIMIT });
    }
    let mut checked = 0u64;
    for size in (1..=cap).rev() {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            checked += 1;
            if positions_min_homogeneous(c, &comb) {
                return Ok(SearchOutcome {
                    max_size: size,
                    witness: MinHomogWitness::from_positions(c, &comb),
                    nodes_explored: checked,
                });
            }
            // Advance to the next combination in lexicographic order.
            let Some(p) = (0..size).rev().find(|&p| comb[p] < n - size + p) else { break };
            comb[p] += 1;
            for q in p + 1..size {
                comb[q] = comb[q - 1] + 1;
            }
        }
    }
    Ok(SearchOutcome {
        max_size: 0,
        witness: MinHomogWitness { elements: Vec::new(), row_colors: BTreeMap::new() },
        nodes_explored: checked,
    })
}

struct RowIndex {
    classes: Vec<Vec<FixedBitSet>>,
    class_of: Vec<Vec<usize>>,
}

impl RowIndex {
    fn new(c: &PairColoring) -> Self {
        let (classes, class_of) = (0..c.len()).map(|i| c.row_classes(i)).unzip();
        RowIndex { classes, class_of }
    }

    /// Positions `> t` that agree with `t` on the row of `last`.
    fn narrowed(&self, cand: &FixedBitSet, last: usize, t: usize) -> FixedBitSet {
        let mut next = cand.clone();
        next.intersect_with(&self.classes[last][self.class_of[last][t]]);
        next.remove_range(..t + 1);
        next
    }
}

/// Depth-first walk over min-homogeneous sets, built in increasing order.
///
/// `cand` holds the positions after `chosen.last()` compatible with every
/// fixed row color; choosing `t` fixes the row color of the last element.
struct Walker<'a, F> {
    rows: RowIndex,
    coloring: &'a PairColoring,
    visit: F,
    nodes: u64,
}

impl<F: FnMut(&[usize], &FixedBitSet) -> bool> Walker<'_, F> {
    /// Calls `visit` on every node; a `false` return prunes the subtree.
    fn walk(&mut self, chosen: &mut Vec<usize>, cand: &FixedBitSet) {
        self.nodes += 1;
        if !(self.visit)(chosen, cand) {
            return;
        }
        let last = *chosen.last().expect("walk starts from a singleton");
        for t in cand.ones() {
            let next = self.rows.narrowed(cand, last, t);
            chosen.push(t);
            self.walk(chosen, &next);
            chosen.pop();
        }
    }

    fn run(&mut self) {
        let n = self.coloring.len();
        for x in 0..n {
            let mut cand = FixedBitSet::with_capacity(n);
            cand.insert_range(x + 1..);
            self.walk(&mut vec![x], &cand);
        }
    }
}

/// Maximum min-homogeneous subset by branch and bound.
///
/// Branches on the next element in increasing order and prunes when the
/// chosen prefix plus all remaining candidates cannot beat the incumbent.
/// Only strict improvements replace the incumbent, so the result is the
/// lexicographically least set of maximum size.
pub fn max_min_homog(c: &PairColoring) -> SearchOutcome {
    let mut best: Vec<usize> = Vec::new();
    let mut walker = Walker {
        rows: RowIndex::new(c),
        coloring: c,
        visit: |chosen: &[usize], cand: &FixedBitSet| {
            if chosen.len() > best.len() {
                best = chosen.to_vec();
            }
            chosen.len() + cand.count_ones(..) > best.len()
        },
        nodes: 0,
    };
    walker.run();
    let nodes = walker.nodes;
    SearchOutcome { max_size: best.len(), witness: MinHomogWitness::from_positions(c, &best), nodes_explored: nodes }
}

/// Calls `f` on every min-homogeneous set with at least two elements, in
/// lexicographic order, as sorted domain values.
pub fn for_each_min_homogeneous(c: &PairColoring, mut f: impl FnMut(&[u64])) {
    let mut buf = Vec::new();
    let mut walker = Walker {
        rows: RowIndex::new(c),
        coloring: c,
        visit: |chosen: &[usize], _: &FixedBitSet| {
            if chosen.len() >= 2 {
                buf.clear();
                buf.extend(chosen.iter().map(|&i| c.domain[i]));
                f(&buf);
            }
            true
        },
        nodes: 0,
    };
    walker.run();
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceBoundReport {
    pub sets_checked: u64,
    /// Min-homogeneous `x_0 < ... < x_i` with `d_i(x_0, x_i) = 0`.
    pub violations: Vec<Vec<u64>>,
    pub largest_min_homogeneous: usize,
}

/// Checks on a construction that no increasing sequence `x_0 < ... < x_i`
/// with `d_i(x_0, x_i) = 0` is min-homogeneous, by enumerating every
/// min-homogeneous set.
pub fn verify_sequence_bound(construction: &Construction) -> SequenceBoundReport {
    let coloring = construction.to_pair_coloring();
    let mut report = SequenceBoundReport { sets_checked: 0, violations: Vec::new(), largest_min_homogeneous: 1 };
    for_each_min_homogeneous(&coloring, |s| {
        report.sets_checked += 1;
        report.largest_min_homogeneous = report.largest_min_homogeneous.max(s.len());
        let i = HierarchyIndex::new(s.len() as u32 - 1).expect("sets have at least two elements");
        let d = construction.dist(i, s[0], s[s.len() - 1]).expect("elements lie in the interval");
        if d == 0 {
            report.violations.push(s.to_vec());
        }
    });
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::ConstructionParams;
    use crate::hierarchy::EvalBudget;

    fn ks(k: u32) -> Construction {
        Construction::new(ConstructionParams::new(k).unwrap(), EvalBudget::default()).unwrap()
    }

    #[test]
    fn pair_coloring_lookup() {
        let c = PairColoring::from_fn(vec![3, 5, 9], |x, y| x + y).unwrap();
        assert_eq!(c.color(5, 3).unwrap(), 8);
        assert_eq!(c.color(9, 5).unwrap(), 14);
        assert_eq!(c.color(4, 5), Err(SearchError::NotInDomain(4)));
        assert_eq!(c.color(5, 5), Err(SearchError::DegeneratePair(5)));
        assert!(!c.is_regressive());
        assert_eq!(PairColoring::from_fn(vec![2, 2], |_, _| 0), Err(SearchError::UnsortedDomain));
        let rows = vec![vec![0, 1], vec![2], vec![]];
        let r = PairColoring::from_rows(vec![3, 5, 9], &rows).unwrap();
        assert_eq!(r.color(3, 9).unwrap(), 1);
        assert!(PairColoring::from_rows(vec![3, 5, 9], &rows[..1]).is_err());
        assert!(PairColoring::from_rows(vec![3, 5, 9], &[vec![0], vec![2], vec![]]).is_err());
    }

    #[test]
    fn min_homogeneous_examples() {
        let c = ks(3).to_pair_coloring();
        assert!(is_min_homogeneous(&c, &[]).unwrap());
        assert!(is_min_homogeneous(&c, &[40, 37]).unwrap());
        assert!(!is_min_homogeneous(&c, &[36, 39, 44]).unwrap());
        assert_eq!(is_min_homogeneous(&c, &[36, 50]), Err(SearchError::NotInDomain(50)));
    }

    #[test]
    fn brute_force_examples() {
        let c = ks(3).to_pair_coloring();
        let out = brute_force_max(&c, 4).unwrap();
        assert_eq!(out.max_size, 3);
        assert!(out.witness.verify(&c));

        let constant = PairColoring::from_fn(vec![5, 6, 7, 8], |_, _| 0).unwrap();
        assert_eq!(brute_force_max(&constant, 10).unwrap().max_size, 4);

        let wide = PairColoring::from_fn((1..=200).collect(), |_, _| 0).unwrap();
        assert!(matches!(brute_force_max(&wide, 8), Err(SearchError::TooManySubsets { .. })));
    }

    #[test]
    fn branch_and_bound_matches_brute_force_on_k3() {
        let c = ks(3).to_pair_coloring();
        let bb = max_min_homog(&c);
        let bf = brute_force_max(&c, 9).unwrap();
        assert_eq!(bb.max_size, 3);
        assert_eq!(bb.witness, bf.witness);
    }

    #[test]
    fn witness_verify_rejects_tampering() {
        let c = PairColoring::from_fn(vec![2, 3, 4, 5], |x, y| (x + y) % 2).unwrap();
        let out = max_min_homog(&c);
        assert!(out.witness.verify(&c));
        let mut bad = out.witness.clone();
        *bad.row_colors.values_mut().next().unwrap() += 1;
        assert!(!bad.verify(&c));
    }

    #[test]
    fn empty_and_singleton_domains() {
        let empty = PairColoring::from_fn(vec![], |_, _| 0).unwrap();
        assert_eq!(max_min_homog(&empty).max_size, 0);
        assert_eq!(brute_force_max(&empty, 3).unwrap().max_size, 0);
        let one = PairColoring::from_fn(vec![7], |_, _| 0).unwrap();
        assert_eq!(max_min_homog(&one).witness.elements, vec![7]);
    }

    #[test]
    fn sequence_bound_on_k3() {
        let r = verify_sequence_bound(&ks(3));
        assert!(r.violations.is_empty());
        assert_eq!(r.largest_min_homogeneous, 3);
    }
}
