//! The explicit regressive pair coloring on `[4k², f_k(4k²))`.
//!
//! For a level `i`, the ladder is the orbit `4k², f_i(4k²), f_i²(4k²), ...`
//! and `d_i(m, n)` counts the rungs in `(m, n]`. A pair `m < n` is
//! classified by the greatest level `I` with a positive count and that count
//! `d = d_I(m, n)`; its color is the Cantor code of `(I, d)`.
//!
//! Every `f_{i+1}` rung is also an `f_i` rung, so once some level has no rung
//! past the base inside the materialized range, neither does any level above
//! it. [`Construction`] materializes exactly the levels below that point.

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::hierarchy::{self, isqrt_half_u64, EvalBudget, HierarchyIndex, Verdict};
use crate::search::PairColoring;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("construction parameter k must be at least 3, got {0}")]
    SmallK(u32),
    #[error("cap {cap} is below the base point {base}")]
    CapBelowBase { cap: u64, base: u64 },
    #[error("empty interval [{lo}, {hi})")]
    EmptyInterval { lo: u64, hi: u64 },
    #[error("f_k(4k^2) not evaluable within budget; lower bound {lower_bound} after {steps} steps")]
    IntervalBudget { lower_bound: BigUint, steps: u64 },
    #[error("f_k(4k^2) = {0} does not fit in 64 bits")]
    IntervalTooLarge(BigUint),
    #[error("ladder for level {level} ran out of budget at rung {last_rung}")]
    LadderBudget { level: u32, last_rung: u64 },
    #[error("pair ({m}, {n}) lies outside the materialized range [{lo}, {hi})")]
    OutOfRange { m: u64, n: u64, lo: u64, hi: u64 },
    #[error("a pair needs two distinct points, got {0} twice")]
    DegeneratePair(u64),
}

/// The fixed parameter `k >= 3`; the base point of every ladder is `4k²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConstructionParams {
    k: u32,
}

impl ConstructionParams {
    pub fn new(k: u32) -> Result<Self, ColoringError> {
        if k < 3 {
            return Err(ColoringError::SmallK(k));
        }
        Ok(ConstructionParams { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn base(&self) -> u64 {
        4 * u64::from(self.k) * u64::from(self.k)
    }
}

/// Half-open interval `[lo, hi)` of naturals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Interval {
    pub lo: u64,
    pub hi: u64,
}

impl Interval {
    pub fn new(lo: u64, hi: u64) -> Result<Self, ColoringError> {
        if lo >= hi {
            return Err(ColoringError::EmptyInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn contains(&self, x: u64) -> bool {
        self.lo <= x && x < self.hi
    }

    pub fn pair_count(&self) -> u64 {
        let n = self.len();
        n * n.saturating_sub(1) / 2
    }

    /// All pairs `m < n` in the interval, row by row.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (self.lo..self.hi).flat_map(move |m| (m + 1..self.hi).map(move |n| (m, n)))
    }
}

/// Orbit of the base point under `f_level`, truncated at `cap`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ladder {
    pub level: HierarchyIndex,
    pub base: u64,
    pub cap: u64,
    /// Strictly increasing, `rungs[0] == base`, `rungs[l+1] == f_level(rungs[l])`.
    pub rungs: Vec<u64>,
    /// False when the budget ran out before the orbit passed `cap`. A partial
    /// ladder answers queries only up to its last rung.
    pub complete: bool,
}

impl Ladder {
    /// Largest `n` for which rung counts in `(m, n]` are known exactly.
    pub fn reach(&self) -> u64 {
        if self.complete {
            self.cap
        } else {
            *self.rungs.last().expect("ladder always holds its base")
        }
    }

    /// Number of rungs in `(m, n]`, for `m <= n <= reach()`.
    pub fn count_between(&self, m: u64, n: u64) -> u64 {
        let upto = |x: u64| self.rungs.partition_point(|&r| r <= x);
        (upto(n) - upto(m)) as u64
    }
}

/// Materializes every rung of the `f_i` orbit of `4k²` that is `<= cap`.
///
/// Level 1 is the successor orbit, i.e. every integer in `[4k², cap]`.
pub fn build_ladder(
    i: HierarchyIndex,
    params: ConstructionParams,
    cap: u64,
    budget: EvalBudget,
) -> Result<Ladder, ColoringError> {
    let base = params.base();
    if cap < base {
        return Err(ColoringError::CapBelowBase { cap, base });
    }
    let mut ladder = Ladder { level: i, base, cap, rungs: vec![base], complete: true };
    if i.get() == 1 {
        ladder.rungs.extend(base + 1..=cap);
        return Ok(ladder);
    }
    let limit = BigUint::from(cap) + 1u32;
    let mut used = 0;
    loop {
        let Some(left) = budget.remaining(used) else {
            ladder.complete = false;
            return Ok(ladder);
        };
        let last = BigUint::from(*ladder.rungs.last().unwrap());
        let c = hierarchy::compare(hierarchy::Hierarchy::SqrtIterated, i, 1, &last, Some(&limit), left);
        used += c.steps_used;
        match c.verdict {
            Verdict::Yes => return Ok(ladder),
            Verdict::No => ladder.rungs.push(c.value.to_u64().expect("below cap")),
            Verdict::Unknown => {
                ladder.complete = false;
                return Ok(ladder);
            }
        }
    }
}

/// The color of a pair: its classification `(I, d)` and the Cantor code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColorCode {
    pub level: u32,
    pub dist: u64,
    pub encoded: u64,
}

/// `C(m + n + 1, 2) + n`, the Cantor pairing of ordered pairs.
///
/// # Panics
///
/// If the code does not fit in a `u64`.
pub fn cantor_pair(m: u64, n: u64) -> u64 {
    checked_cantor_pair(m, n).expect("cantor code overflows u64")
}

pub fn checked_cantor_pair(m: u64, n: u64) -> Option<u64> {
    let s = u128::from(m) + u128::from(n);
    let code = s.checked_mul(s + 1)? / 2 + u128::from(n);
    u64::try_from(code).ok()
}

/// Inverse of [`cantor_pair`].
pub fn cantor_unpair(p: u64) -> (u64, u64) {
    let p = u128::from(p);
    // Largest s with s(s+1)/2 <= p.
    let s = ((8 * p + 1).sqrt() - 1) / 2;
    let n = p - s * (s + 1) / 2;
    ((s - n) as u64, n as u64)
}

/// Returns `[4k², f_k(4k²))`, the interval on which the coloring is regressive.
pub fn construction_interval(params: ConstructionParams, budget: EvalBudget) -> Result<Interval, ColoringError> {
    let i = HierarchyIndex::new(params.k()).expect("k >= 3");
    let r = hierarchy::f_eval(i, &BigUint::from(params.base()), budget);
    match r.exact() {
        Some(v) => {
            let hi = v.to_u64().ok_or_else(|| ColoringError::IntervalTooLarge(v.clone()))?;
            Interval::new(params.base(), hi)
        }
        None => Err(ColoringError::IntervalBudget { lower_bound: r.value, steps: r.steps_used }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegressiveReport {
    pub pairs_checked: u64,
    /// Pairs `(m, n, color)` with `color >= m`.
    pub violations: Vec<(u64, u64, u64)>,
    pub max_color: u64,
    /// Pairs whose color exceeds `Pr(⌊√m/2⌋, ⌊√m/2⌋)`.
    pub code_bound_violations: Vec<(u64, u64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SqrtBoundReport {
    pub pairs_checked: u64,
    /// Pairs `(m, n, d)` with `d > ⌊√m/2⌋`.
    pub violations: Vec<(u64, u64, u64)>,
    pub max_dist: u64,
}

/// The coloring with all needed ladders materialized over one interval.
#[derive(Debug, Clone)]
pub struct Construction {
    params: ConstructionParams,
    interval: Interval,
    /// Ladders for levels `2..=ladders.len() + 1`; every level above the
    /// last has no rung in `(lo, hi)`.
    ladders: Vec<Ladder>,
}

impl Construction {
    /// The coloring on the full interval `[4k², f_k(4k²))`.
    pub fn new(params: ConstructionParams, budget: EvalBudget) -> Result<Self, ColoringError> {
        let interval = construction_interval(params, budget)?;
        Self::on_interval(params, interval, budget)
    }

    /// The coloring restricted to `[4k², cap]`, for `k` whose full interval
    /// is out of reach.
    pub fn with_cap(params: ConstructionParams, cap: u64, budget: EvalBudget) -> Result<Self, ColoringError> {
        if cap < params.base() {
            return Err(ColoringError::CapBelowBase { cap, base: params.base() });
        }
        Self::on_interval(params, Interval::new(params.base(), cap + 1)?, budget)
    }

    fn on_interval(params: ConstructionParams, interval: Interval, budget: EvalBudget) -> Result<Self, ColoringError> {
        let cap = interval.hi - 1;
        let mut ladders = Vec::new();
        let mut level = HierarchyIndex::new(2).unwrap();
        loop {
            let ladder = build_ladder(level, params, cap, budget)?;
            if !ladder.complete {
                return Err(ColoringError::LadderBudget {
                    level: level.get(),
                    last_rung: *ladder.rungs.last().unwrap(),
                });
            }
            if ladder.rungs.len() == 1 {
                break;
            }
            ladders.push(ladder);
            level = level.next();
        }
        Ok(Construction { params, interval, ladders })
    }

    pub fn params(&self) -> ConstructionParams {
        self.params
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// Highest level with a rung inside the interval (at least 1).
    pub fn top_level(&self) -> u32 {
        self.ladders.len() as u32 + 1
    }

    pub fn ladder(&self, level: u32) -> Option<&Ladder> {
        self.ladders.get(level.checked_sub(2)? as usize)
    }

    fn ordered(&self, m: u64, n: u64) -> Result<(u64, u64), ColoringError> {
        let (m, n) = if m <= n { (m, n) } else { (n, m) };
        if !self.interval.contains(m) || !self.interval.contains(n) {
            return Err(ColoringError::OutOfRange { m, n, lo: self.interval.lo, hi: self.interval.hi });
        }
        Ok((m, n))
    }

    /// `d_i(m, n)`: rungs of the level-`i` ladder in `(min, max]`.
    pub fn dist(&self, i: HierarchyIndex, m: u64, n: u64) -> Result<u64, ColoringError> {
        let (m, n) = self.ordered(m, n)?;
        Ok(self.dist_ordered(i.get(), m, n))
    }

    fn dist_ordered(&self, level: u32, m: u64, n: u64) -> u64 {
        match level {
            1 => n - m,
            _ => self.ladder(level).map_or(0, |l| l.count_between(m, n)),
        }
    }

    /// The greatest level with a positive distance, and that distance.
    pub fn classify(&self, m: u64, n: u64) -> Result<ColorCode, ColoringError> {
        if m == n {
            return Err(ColoringError::DegeneratePair(m));
        }
        let (m, n) = self.ordered(m, n)?;
        Ok(self.classify_ordered(m, n))
    }

    fn classify_ordered(&self, m: u64, n: u64) -> ColorCode {
        let (level, dist) = (1..=self.top_level())
            .rev()
            .map(|i| (i, self.dist_ordered(i, m, n)))
            .find(|&(_, d)| d > 0)
            .expect("d_1(m, n) = n - m > 0");
        ColorCode { level, dist, encoded: cantor_pair(u64::from(level), dist) }
    }

    /// The color `Pr(I(m, n), d(m, n))`.
    pub fn color(&self, m: u64, n: u64) -> Result<u64, ColoringError> {
        self.classify(m, n).map(|c| c.encoded)
    }

    /// Every pair `c(m, n) < m`, plus the code bound used to prove it.
    pub fn verify_regressive(&self) -> RegressiveReport {
        let mut report = RegressiveReport {
            pairs_checked: 0,
            violations: Vec::new(),
            max_color: 0,
            code_bound_violations: Vec::new(),
        };
        for (m, n) in self.interval.pairs() {
            let code = self.classify_ordered(m, n);
            report.pairs_checked += 1;
            report.max_color = report.max_color.max(code.encoded);
            if code.encoded >= m {
                report.violations.push((m, n, code.encoded));
            }
            let h = isqrt_half_u64(m);
            if code.encoded > cantor_pair(h, h) {
                report.code_bound_violations.push((m, n, code.encoded));
            }
        }
        report
    }

    /// Every pair `d(m, n) <= ⌊√m/2⌋`.
    pub fn verify_sqrt_bound(&self) -> SqrtBoundReport {
        let mut report = SqrtBoundReport { pairs_checked: 0, violations: Vec::new(), max_dist: 0 };
        for (m, n) in self.interval.pairs() {
            let d = self.classify_ordered(m, n).dist;
            report.pairs_checked += 1;
            report.max_dist = report.max_dist.max(d);
            if d > isqrt_half_u64(m) {
                report.violations.push((m, n, d));
            }
        }
        report
    }

    pub fn to_pair_coloring(&self) -> PairColoring {
        let domain: Vec<u64> = (self.interval.lo..self.interval.hi).collect();
        PairColoring::from_fn(domain, |m, n| self.classify_ordered(m, n).encoded)
            .expect("interval is a strictly increasing domain")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(k: u32) -> ConstructionParams {
        ConstructionParams::new(k).unwrap()
    }

    fn idx(i: u32) -> HierarchyIndex {
        HierarchyIndex::new(i).unwrap()
    }

    #[test]
    fn params_reject_small_k() {
        assert_eq!(ConstructionParams::new(2), Err(ColoringError::SmallK(2)));
        assert_eq!(k(3).base(), 36);
    }

    #[test]
    fn ladder_examples() {
        let b = EvalBudget::default();
        assert_eq!(build_ladder(idx(3), k(3), 50, b).unwrap().rungs, vec![36, 45]);
        assert_eq!(build_ladder(idx(2), k(3), 45, b).unwrap().rungs, vec![36, 39, 42, 45]);
        assert_eq!(build_ladder(idx(1), k(3), 40, b).unwrap().rungs, vec![36, 37, 38, 39, 40]);
        assert!(matches!(build_ladder(idx(2), k(3), 35, b), Err(ColoringError::CapBelowBase { .. })));
    }

    #[test]
    fn ladder_partial_on_tiny_budget() {
        let l = build_ladder(idx(3), k(3), 10_000, EvalBudget::new(5).unwrap()).unwrap();
        assert!(!l.complete);
        assert_eq!(l.reach(), *l.rungs.last().unwrap());
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(cantor_pair(0, 0), 0);
        assert_eq!(cantor_pair(1, 1), 4);
        assert_eq!(cantor_pair(3, 3), 24);
        assert_eq!(cantor_pair(2, 1), 7);
        assert_eq!(cantor_unpair(7), (2, 1));
        assert_eq!(checked_cantor_pair(u64::MAX, 1), None);
        let big = cantor_pair(3_000_000_000, 17);
        assert_eq!(cantor_unpair(big), (3_000_000_000, 17));
    }

    #[test]
    fn interval_examples() {
        let b = EvalBudget::default();
        assert_eq!(construction_interval(k(3), b).unwrap(), Interval { lo: 36, hi: 45 });
        assert_eq!(construction_interval(k(4), b).unwrap(), Interval { lo: 64, hi: 140 });
        match construction_interval(k(5), b) {
            Err(ColoringError::IntervalBudget { lower_bound, .. }) => {
                assert!(lower_bound > BigUint::from(100_000_000u64))
            }
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn dist_and_classify_examples() {
        let c = Construction::new(k(3), EvalBudget::default()).unwrap();
        assert_eq!(c.top_level(), 2);
        assert_eq!(c.dist(idx(1), 40, 44).unwrap(), 4);
        assert_eq!(c.dist(idx(2), 36, 44).unwrap(), 2);
        assert_eq!(c.dist(idx(2), 44, 36).unwrap(), 2);
        assert_eq!(c.dist(idx(2), 36, 36).unwrap(), 0);
        assert_eq!(c.dist(idx(7), 36, 44).unwrap(), 0);
        let code = |m, n| {
            let c = c.classify(m, n).unwrap();
            (c.level, c.dist)
        };
        assert_eq!(code(36, 39), (2, 1));
        assert_eq!(code(37, 38), (1, 1));
        assert_eq!(code(36, 44), (2, 2));
        assert_eq!(c.color(36, 39).unwrap(), 7);
        assert_eq!(c.color(37, 38).unwrap(), 4);
        assert_eq!(c.color(36, 44).unwrap(), 12);
        assert_eq!(c.classify(40, 40), Err(ColoringError::DegeneratePair(40)));
        assert!(matches!(c.classify(36, 45), Err(ColoringError::OutOfRange { .. })));
    }

    #[test]
    fn verifier_examples() {
        let c3 = Construction::new(k(3), EvalBudget::default()).unwrap();
        let r = c3.verify_regressive();
        assert_eq!((r.pairs_checked, r.violations.len()), (36, 0));
        assert!(r.max_color <= cantor_pair(3, 3));
        assert!(r.code_bound_violations.is_empty());
        let s = c3.verify_sqrt_bound();
        assert_eq!((s.pairs_checked, s.violations.len()), (36, 0));

        let c4 = Construction::new(k(4), EvalBudget::default()).unwrap();
        assert_eq!(c4.verify_regressive().pairs_checked, 2850);
        assert!(c4.verify_regressive().violations.is_empty());
        assert!(c4.verify_sqrt_bound().violations.is_empty());
    }

    #[test]
    fn capped_prefix_for_large_k() {
        let c = Construction::with_cap(k(5), 400, EvalBudget::default()).unwrap();
        assert_eq!(c.interval(), Interval { lo: 100, hi: 401 });
        assert!(c.verify_regressive().violations.is_empty());
        assert!(c.verify_sqrt_bound().violations.is_empty());
    }
}
