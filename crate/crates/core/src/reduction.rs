//! Lifting a pair coloring to a red/blue coloring of triples.
//!
//! A triple `x < y < z` is red when `c(x, y) = c(x, z)` and blue otherwise.
//! A red-homogeneous set is exactly a min-homogeneous one. A blue-homogeneous
//! set `A` has pairwise distinct colors on the row of `min A`; under a
//! regressive coloring those colors lie below `min A`, so `|A| <= min A + 1`.

use serde::Serialize;
use thiserror::Error;

use crate::search::{MinHomogWitness, PairColoring, SearchError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("set needs at least two elements")]
    TooSmall,
    #[error("row of {row} is not constant: c({row}, {a}) = {ca} but c({row}, {b}) = {cb}")]
    NotRedHomogeneous { row: u64, a: u64, ca: u64, b: u64, cb: u64 },
    #[error("coloring is not regressive at ({0}, {1})")]
    NotRegressive(u64, u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleColor {
    Red,
    Blue,
}

/// Red/blue coloring of the triples of a pair coloring's domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleColoring {
    domain: Vec<u64>,
    /// Indexed by the combinatorial number system: `(a, b, c)` with
    /// `a < b < c` at `C(c, 3) + C(b, 2) + a`.
    red: Vec<bool>,
}

fn triple_index(a: usize, b: usize, c: usize) -> usize {
    c * (c - 1) * (c.saturating_sub(2)) / 6 + b * (b - 1) / 2 + a
}

/// Colors `x < y < z` red iff `c(x, y) = c(x, z)`.
pub fn lift_to_triples(c: &PairColoring) -> TripleColoring {
    let n = c.len();
    let mut red = vec![false; triple_index(0, 1, n.max(2))];
    for z in 2..n {
        for y in 1..z {
            for x in 0..y {
                red[triple_index(x, y, z)] = c.color_at(x, y) == c.color_at(x, z);
            }
        }
    }
    TripleColoring { domain: c.domain().to_vec(), red }
}

impl TripleColoring {
    pub fn domain(&self) -> &[u64] {
        &self.domain
    }

    fn red_at(&self, a: usize, b: usize, c: usize) -> bool {
        self.red[triple_index(a, b, c)]
    }

    /// Color of the triple `{x, y, z}` (any order, distinct domain points).
    pub fn color(&self, x: u64, y: u64, z: u64) -> Result<TripleColor, SearchError> {
        match self.positions(&[x, y, z])?.as_slice() {
            &[a, b, c] => Ok(if self.red_at(a, b, c) { TripleColor::Red } else { TripleColor::Blue }),
            _ => Err(SearchError::DegeneratePair(x)),
        }
    }

    fn positions(&self, s: &[u64]) -> Result<Vec<usize>, SearchError> {
        let mut idx = s
            .iter()
            .map(|&v| self.domain.binary_search(&v).map_err(|_| SearchError::NotInDomain(v)))
            .collect::<Result<Vec<_>, _>>()?;
        idx.sort_unstable();
        idx.dedup();
        Ok(idx)
    }

    fn homogeneous_positions(&self, idx: &[usize], color: TripleColor) -> bool {
        let want = color == TripleColor::Red;
        let n = idx.len();
        (0..n).all(|i| (i + 1..n).all(|j| (j + 1..n).all(|l| self.red_at(idx[i], idx[j], idx[l]) == want)))
    }

    /// Whether every triple inside `s` has the given color.
    pub fn is_homogeneous(&self, s: &[u64], color: TripleColor) -> Result<bool, SearchError> {
        Ok(self.homogeneous_positions(&self.positions(s)?, color))
    }

    /// Every `color`-homogeneous set with `min_size..=max_size` elements,
    /// in lexicographic order.
    pub fn homogeneous_sets(&self, color: TripleColor, min_size: usize, max_size: usize) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        self.extend_homogeneous(color, min_size, max_size, 0, &mut chosen, &mut |s| out.push(s.to_vec()));
        out
    }

    fn extend_homogeneous(
        &self,
        color: TripleColor,
        min_size: usize,
        max_size: usize,
        from: usize,
        chosen: &mut Vec<usize>,
        emit: &mut impl FnMut(&[u64]),
    ) {
        if chosen.len() >= min_size {
            let values: Vec<u64> = chosen.iter().map(|&i| self.domain[i]).collect();
            emit(&values);
        }
        if chosen.len() == max_size {
            return;
        }
        let want = color == TripleColor::Red;
        for t in from..self.domain.len() {
            let fits =
                (0..chosen.len()).all(|i| (i + 1..chosen.len()).all(|j| self.red_at(chosen[i], chosen[j], t) == want));
            if fits {
                chosen.push(t);
                self.extend_homogeneous(color, min_size, max_size, t + 1, chosen, emit);
                chosen.pop();
            }
        }
    }
}

/// Turns a red-homogeneous set into a min-homogeneous witness, checking
/// every row rather than trusting the caller.
pub fn extract_min_homog(a: &[u64], c: &PairColoring) -> Result<MinHomogWitness, ReductionError> {
    let mut elements = a.to_vec();
    elements.sort_unstable();
    elements.dedup();
    if elements.len() < 2 {
        return Err(ReductionError::TooSmall);
    }
    let mut row_colors = std::collections::BTreeMap::new();
    for (i, &x) in elements.iter().enumerate().take(elements.len() - 1) {
        let first = elements[i + 1];
        let row = c.color(x, first)?;
        for &y in &elements[i + 2..] {
            let cy = c.color(x, y)?;
            if cy != row {
                return Err(ReductionError::NotRedHomogeneous { row: x, a: first, ca: row, b: y, cb: cy });
            }
        }
        row_colors.insert(x, row);
    }
    Ok(MinHomogWitness { elements, row_colors })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlueBoundReport {
    /// Blue-homogeneous sets examined (at least three elements).
    pub blue_sets_examined: u64,
    /// Largest blue-homogeneous set found, relative to its minimum: the
    /// maximum of `|A| - min A` over examined sets.
    pub max_excess: Option<i64>,
    /// Blue-homogeneous sets with `|A| > min A + 1`.
    pub violations: Vec<Vec<u64>>,
    /// Blue-homogeneous sets whose minimum's row repeats a color.
    pub repeated_row_colors: Vec<Vec<u64>>,
}

/// Exhaustively searches for a blue-homogeneous `A` with `|A| > min A + 1`.
///
/// Blue-homogeneity is hereditary, so it suffices to look, for each
/// candidate minimum `x`, for blue sets of at most `x + 2` elements
/// starting at `x`. `max_set_size`, when given, caps the search further.
pub fn blue_bound_check(c: &PairColoring, max_set_size: Option<usize>) -> Result<BlueBoundReport, ReductionError> {
    if let Some((m, n, _)) = c.regressive_violation() {
        return Err(ReductionError::NotRegressive(m, n));
    }
    let lifted = lift_to_triples(c);
    let mut report = BlueBoundReport {
        blue_sets_examined: 0,
        max_excess: None,
        violations: Vec::new(),
        repeated_row_colors: Vec::new(),
    };
    let n = c.len();
    for x in 0..n {
        let min = c.domain()[x];
        let limit = usize::try_from(min.saturating_add(2)).unwrap_or(usize::MAX).min(n - x);
        let limit = max_set_size.map_or(limit, |m| limit.min(m));
        if limit < 3 {
            continue;
        }
        let mut chosen = vec![x];
        lifted.extend_homogeneous(TripleColor::Blue, 3, limit, x + 1, &mut chosen, &mut |s| {
            report.blue_sets_examined += 1;
            let excess = s.len() as i64 - min as i64;
            report.max_excess = Some(report.max_excess.map_or(excess, |e| e.max(excess)));
            if s.len() as u64 > min + 1 {
                report.violations.push(s.to_vec());
            }
            let mut row: Vec<u64> = s[1..].iter().map(|&y| c.color(min, y).unwrap()).collect();
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                report.repeated_row_colors.push(s.to_vec());
            }
        });
    }
    Ok(report)
}
