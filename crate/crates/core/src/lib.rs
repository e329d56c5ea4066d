//! Regressive pair colorings and min-homogeneous sets.
//!
//! * [`hierarchy`]: budgeted exact evaluation of the square-root iterated
//!   hierarchy `f_i` and the Ackermann approximations `A_i`.
//! * [`coloring`]: the explicit regressive coloring built from rung-counting
//!   distances along `f_i` orbits, plus its verifiers.
//! * [`search`]: min-homogeneous subset search, exact small regressive Ramsey
//!   numbers and DIMACS CNF export.
//! * [`reduction`]: the red/blue lift of a pair coloring to triples.

pub mod coloring;
pub mod hierarchy;
pub mod reduction;
pub mod search;

pub use coloring::{cantor_pair, cantor_unpair, ColorCode, Construction, ConstructionParams, Interval, Ladder};
pub use hierarchy::{EvalBudget, EvalKind, EvalResult, HierarchyIndex, Verdict};
pub use search::{MinHomogWitness, PairColoring, SearchOutcome};

pub(crate) fn ser_biguint<S: serde::Serializer>(n: &num_bigint::BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(n)
}
