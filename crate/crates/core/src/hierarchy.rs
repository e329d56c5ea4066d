//! Exact, budgeted evaluation of two fast-growing hierarchies:
//!
//! * the square-root hierarchy `f_1(n) = n + 1`, `f_{i+1}(n) = f_i^(⌊√n/2⌋)(n)`
//!   that drives the regressive coloring construction, and
//! * the Ackermann approximations `A_1(n) = n + 1`, `A_{i+1}(n) = A_i^(n)(n)`.
//!
//! Values are arbitrary-precision naturals. Evaluation runs on `u128` while it
//! fits and transparently restarts on [`BigUint`] when it would overflow, so
//! no fixed-width wrap-around can ever leak into a result.
//!
//! Every function in both hierarchies satisfies `x <= f(x)`, and evaluation
//! is depth-first, so the sequence of values produced along the way is
//! nondecreasing and every one of them is a lower bound on the final value.
//! This is what makes budget-exhausted results and early-exit threshold
//! comparisons sound.

use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

/// Default number of elementary steps allowed per evaluation.
pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("hierarchy index must be at least 1")]
    ZeroIndex,
    #[error("evaluation budget must allow at least one step")]
    EmptyBudget,
    #[error("empty range [{lo}, {hi})")]
    EmptyRange { lo: u64, hi: u64 },
}

/// Upper limit on elementary applications for one evaluation.
///
/// One step is one application of `f_1` (or `A_1`), or one application of
/// the closed form `f_2(n) = n + ⌊√n/2⌋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EvalBudget {
    max_steps: u64,
}

impl EvalBudget {
    pub fn new(max_steps: u64) -> Result<Self, HierarchyError> {
        if max_steps == 0 {
            return Err(HierarchyError::EmptyBudget);
        }
        Ok(EvalBudget { max_steps })
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }

    /// The budget left after `used` steps, or `None` if nothing is left.
    pub fn remaining(&self, used: u64) -> Option<EvalBudget> {
        let left = self.max_steps.saturating_sub(used);
        (left > 0).then_some(EvalBudget { max_steps: left })
    }
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget { max_steps: DEFAULT_MAX_STEPS }
    }
}

/// Index `i >= 1` of `f_i` or `A_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct HierarchyIndex(u32);

impl HierarchyIndex {
    pub fn new(i: u32) -> Result<Self, HierarchyError> {
        if i == 0 {
            return Err(HierarchyError::ZeroIndex);
        }
        Ok(HierarchyIndex(i))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn next(self) -> HierarchyIndex {
        HierarchyIndex(self.0 + 1)
    }
}

impl std::fmt::Display for HierarchyIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Which of the two hierarchies to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hierarchy {
    /// `f_{i+1}(n) = f_i^(⌊√n/2⌋)(n)`
    SqrtIterated,
    /// `A_{i+1}(n) = A_i^(n)(n)`
    Ackermann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalKind {
    Exact,
    BudgetExceeded,
}

/// Outcome of a budgeted evaluation.
///
/// When `kind` is [`EvalKind::BudgetExceeded`], `value` is the largest
/// intermediate value reached, which is a lower bound on the true value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvalResult {
    pub kind: EvalKind,
    #[serde(serialize_with = "crate::ser_biguint")]
    pub value: BigUint,
    pub steps_used: u64,
}

impl EvalResult {
    pub fn is_exact(&self) -> bool {
        self.kind == EvalKind::Exact
    }

    pub fn exact(&self) -> Option<&BigUint> {
        self.is_exact().then_some(&self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

/// Result of comparing a hierarchy value against a threshold `T`.
///
/// * `Yes`: the value is `>= T`; `value` is the first intermediate reaching `T`.
/// * `No`: the value is `< T`; `value` is exact.
/// * `Unknown`: budget ran out; `value` is the best lower bound found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub verdict: Verdict,
    #[serde(serialize_with = "crate::ser_biguint")]
    pub value: BigUint,
    pub steps_used: u64,
}

/// `⌊⌊√n⌋ / 2⌋`, the iteration count in `f_{i+1}(n) = f_i^(⌊√n/2⌋)(n)`.
pub fn isqrt_half(n: &BigUint) -> BigUint {
    n.sqrt() >> 1u32
}

pub fn isqrt_half_u64(n: u64) -> u64 {
    n.sqrt() / 2
}

/// Arithmetic the evaluator needs. `None` signals overflow of a fixed-width
/// representation.
trait Word: Clone + Ord {
    fn from_big(n: &BigUint) -> Option<Self>;
    fn into_big(self) -> BigUint;
    fn succ(&self) -> Option<Self>;
    fn plus_half_root(&self) -> Option<Self>;
    fn half_root_count(&self) -> u64;
    fn count(&self) -> u64;
}

impl Word for u128 {
    fn from_big(n: &BigUint) -> Option<Self> {
        n.to_u128()
    }
    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
    fn succ(&self) -> Option<Self> {
        self.checked_add(1)
    }
    fn plus_half_root(&self) -> Option<Self> {
        self.checked_add(self.sqrt() / 2)
    }
    fn half_root_count(&self) -> u64 {
        u64::try_from(self.sqrt() / 2).unwrap_or(u64::MAX)
    }
    fn count(&self) -> u64 {
        u64::try_from(*self).unwrap_or(u64::MAX)
    }
}

impl Word for BigUint {
    fn from_big(n: &BigUint) -> Option<Self> {
        Some(n.clone())
    }
    fn into_big(self) -> BigUint {
        self
    }
    fn succ(&self) -> Option<Self> {
        Some(self + 1u32)
    }
    fn plus_half_root(&self) -> Option<Self> {
        Some(self + isqrt_half(self))
    }
    fn half_root_count(&self) -> u64 {
        isqrt_half(self).to_u64().unwrap_or(u64::MAX)
    }
    fn count(&self) -> u64 {
        self.to_u64().unwrap_or(u64::MAX)
    }
}

enum Halt {
    Budget,
    Reached,
    Overflow,
}

/// One depth-first evaluation. `high` tracks the largest value seen.
struct Run<W> {
    hierarchy: Hierarchy,
    steps: u64,
    max_steps: u64,
    target: Option<W>,
    high: W,
}

impl<W: Word> Run<W> {
    fn tick(&mut self) -> Result<(), Halt> {
        if self.steps >= self.max_steps {
            return Err(Halt::Budget);
        }
        self.steps += 1;
        Ok(())
    }

    fn observe(&mut self, v: &W) -> Result<(), Halt> {
        if *v > self.high {
            self.high = v.clone();
        }
        match &self.target {
            Some(t) if v >= t => Err(Halt::Reached),
            _ => Ok(()),
        }
    }

    fn apply(&mut self, i: u32, x: W) -> Result<W, Halt> {
        let y = match (self.hierarchy, i) {
            (_, 1) => {
                self.tick()?;
                x.succ().ok_or(Halt::Overflow)?
            }
            (Hierarchy::SqrtIterated, 2) => {
                self.tick()?;
                x.plus_half_root().ok_or(Halt::Overflow)?
            }
            (Hierarchy::SqrtIterated, _) => {
                let t = x.half_root_count();
                self.iterate(i - 1, t, x)?
            }
            (Hierarchy::Ackermann, _) => {
                let t = x.count();
                self.iterate(i - 1, t, x)?
            }
        };
        self.observe(&y)?;
        Ok(y)
    }

    fn iterate(&mut self, i: u32, times: u64, mut x: W) -> Result<W, Halt> {
        for _ in 0..times {
            x = self.apply(i, x)?;
        }
        Ok(x)
    }
}

fn run_with<W: Word>(
    hierarchy: Hierarchy,
    i: HierarchyIndex,
    times: u64,
    n: &BigUint,
    target: Option<&BigUint>,
    budget: EvalBudget,
) -> Option<Comparison> {
    let start = W::from_big(n)?;
    // A target beyond the word range can only be certified on the wide path.
    let target = match target {
        Some(t) => Some(W::from_big(t)?),
        None => None,
    };
    let mut run = Run { hierarchy, steps: 0, max_steps: budget.max_steps(), target, high: start.clone() };
    let outcome = run.observe(&start).and_then(|_| run.iterate(i.get(), times, start));
    let (verdict, value) = match outcome {
        Ok(v) => (Verdict::No, v),
        Err(Halt::Reached) => (Verdict::Yes, run.high),
        Err(Halt::Budget) => (Verdict::Unknown, run.high),
        Err(Halt::Overflow) => return None,
    };
    Some(Comparison { verdict, value: value.into_big(), steps_used: run.steps })
}

/// Evaluates `h_i^(times)(n)` and compares it with `target` (if any),
/// stopping as soon as any intermediate value reaches the target.
///
/// Without a target, a completed evaluation reports [`Verdict::No`].
pub fn compare(
    hierarchy: Hierarchy,
    i: HierarchyIndex,
    times: u64,
    n: &BigUint,
    target: Option<&BigUint>,
    budget: EvalBudget,
) -> Comparison {
    run_with::<u128>(hierarchy, i, times, n, target, budget)
        .or_else(|| run_with::<BigUint>(hierarchy, i, times, n, target, budget))
        .expect("arbitrary-precision evaluation cannot overflow")
}

fn to_eval(c: Comparison) -> EvalResult {
    let kind = match c.verdict {
        Verdict::No => EvalKind::Exact,
        Verdict::Unknown => EvalKind::BudgetExceeded,
        Verdict::Yes => unreachable!("no target was set"),
    };
    EvalResult { kind, value: c.value, steps_used: c.steps_used }
}

/// `f_i^(l)(n)`, the `l`-fold iterate of `f_i`.
pub fn f_iter(i: HierarchyIndex, l: u64, n: &BigUint, budget: EvalBudget) -> EvalResult {
    to_eval(compare(Hierarchy::SqrtIterated, i, l, n, None, budget))
}

/// `f_i(n)`.
pub fn f_eval(i: HierarchyIndex, n: &BigUint, budget: EvalBudget) -> EvalResult {
    f_iter(i, 1, n, budget)
}

/// `A_i(n)`.
pub fn ack_eval(i: HierarchyIndex, n: &BigUint, budget: EvalBudget) -> EvalResult {
    to_eval(compare(Hierarchy::Ackermann, i, 1, n, None, budget))
}

/// Decides `f_i(n) >= threshold`, exiting early on the first intermediate
/// value that reaches it.
pub fn exceeds_threshold(i: HierarchyIndex, n: &BigUint, threshold: &BigUint, budget: EvalBudget) -> Verdict {
    compare(Hierarchy::SqrtIterated, i, 1, n, Some(threshold), budget).verdict
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneViolation {
    /// `f_i(n) >= f_i(n + 1)`
    NotIncreasing { n: u64 },
    /// `f_i(n) <= n`
    NotInflationary { n: u64 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MonotoneReport {
    pub checked: u64,
    pub violations: Vec<MonotoneViolation>,
    /// Points whose value (or whose successor's value) was not evaluable.
    pub skipped: Vec<u64>,
}

/// Checks `f_i(n) < f_i(n+1)` and `n < f_i(n)` for every `n` in `[lo, hi)`.
///
/// Each point gets its own `budget`. Note that `f_i(n) = n` for `n < 4` and
/// `i >= 2`, which shows up as [`MonotoneViolation::NotInflationary`].
pub fn verify_monotone(
    i: HierarchyIndex,
    lo: u64,
    hi: u64,
    budget: EvalBudget,
) -> Result<MonotoneReport, HierarchyError> {
    if lo >= hi {
        return Err(HierarchyError::EmptyRange { lo, hi });
    }
    let mut report = MonotoneReport::default();
    let mut current = f_eval(i, &BigUint::from(lo), budget);
    for n in lo..hi {
        let next = f_eval(i, &BigUint::from(n + 1), budget);
        match (current.exact(), next.exact()) {
            (Some(a), Some(b)) => {
                report.checked += 1;
                if a >= b {
                    report.violations.push(MonotoneViolation::NotIncreasing { n });
                }
                if *a <= BigUint::from(n) {
                    report.violations.push(MonotoneViolation::NotInflationary { n });
                }
            }
            _ => report.skipped.push(n),
        }
        current = next;
    }
    Ok(report)
}

/// Finite instances of the growth comparisons between the two hierarchies at
/// one `(i, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DominationCheck {
    pub i: u32,
    pub n: u64,
    /// `f_i(n)` (exact, or a lower bound if budget ran out).
    pub f_value: EvalResult,
    /// `A_i(n)`.
    pub a_value: EvalResult,
    /// `f_i(n) <= f_{i+6}^(2)(n)`.
    pub f_below_f_plus_6_twice: Verdict,
    /// `A_i(n) <= f_{i+6}^(2)(n)`.
    pub a_below_f_plus_6_twice: Verdict,
    /// `A_i(n) <= f_{i+7}(n)`.
    pub a_below_f_plus_7: Verdict,
}

impl DominationCheck {
    pub fn all_yes(&self) -> bool {
        [self.f_below_f_plus_6_twice, self.a_below_f_plus_6_twice, self.a_below_f_plus_7]
            .iter()
            .all(|v| *v == Verdict::Yes)
    }
}

fn dominated_by(lhs: &EvalResult, i: HierarchyIndex, times: u64, n: &BigUint, budget: EvalBudget) -> Verdict {
    match lhs.exact() {
        Some(v) => compare(Hierarchy::SqrtIterated, i, times, n, Some(v), budget).verdict,
        None => Verdict::Unknown,
    }
}

/// Evaluates both sides of the domination inequalities with early exit on
/// the larger side. A `Yes` means the inequality was certified.
pub fn domination_check(i: HierarchyIndex, n: u64, budget: EvalBudget) -> DominationCheck {
    let big_n = BigUint::from(n);
    let f_value = f_eval(i, &big_n, budget);
    let a_value = ack_eval(i, &big_n, budget);
    let plus = |d: u32| HierarchyIndex(i.get() + d);
    DominationCheck {
        i: i.get(),
        n,
        f_below_f_plus_6_twice: dominated_by(&f_value, plus(6), 2, &big_n, budget),
        a_below_f_plus_6_twice: dominated_by(&a_value, plus(6), 2, &big_n, budget),
        a_below_f_plus_7: dominated_by(&a_value, plus(7), 1, &big_n, budget),
        f_value,
        a_value,
    }
}

/// `16 n^2`, the quadratic lower bound `f_i(n) >= 16 n^2` for `i >= 7, n >= 16`.
pub fn sixteen_n_squared(n: &BigUint) -> BigUint {
    n * n * 16u32
}

/// Convenience: `f_i(n)` as `u64` when exact and in range.
pub fn f_eval_u64(i: u32, n: u64, budget: EvalBudget) -> Option<u64> {
    let i = HierarchyIndex::new(i).ok()?;
    f_eval(i, &BigUint::from(n), budget).exact()?.to_u64()
}
