//! Python bindings. Naturals cross the boundary as Python ints; errors
//! surface as `ValueError`.

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use regressive::coloring::{checked_cantor_pair, construction_interval, Construction, ConstructionParams};
use regressive::hierarchy::{self, EvalBudget, EvalResult, HierarchyIndex, Verdict, DEFAULT_MAX_STEPS};
use regressive::reduction::{blue_bound_check, lift_to_triples, TripleColor};
use regressive::search::{self, NuSearchOptions, PairColoring, SearchOutcome, DEFAULT_NODE_LIMIT};

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn budget(steps: Option<u64>) -> PyResult<EvalBudget> {
    EvalBudget::new(steps.unwrap_or(DEFAULT_MAX_STEPS)).map_err(value_error)
}

fn index(i: u32) -> PyResult<HierarchyIndex> {
    HierarchyIndex::new(i).map_err(value_error)
}

/// Result of a budgeted evaluation; `value` is a lower bound unless `exact`.
#[pyclass(name = "EvalResult", frozen, get_all)]
struct PyEvalResult {
    value: BigUint,
    exact: bool,
    steps_used: u64,
}

#[pymethods]
impl PyEvalResult {
    fn __repr__(&self) -> String {
        format!("EvalResult(value={}, exact={}, steps_used={})", self.value, self.exact, self.steps_used)
    }
}

impl From<EvalResult> for PyEvalResult {
    fn from(r: EvalResult) -> Self {
        PyEvalResult { exact: r.is_exact(), value: r.value, steps_used: r.steps_used }
    }
}

/// `f_i(n)`.
#[pyfunction]
#[pyo3(signature = (i, n, budget=None))]
fn f_eval(py: Python<'_>, i: u32, n: BigUint, budget: Option<u64>) -> PyResult<PyEvalResult> {
    let (i, b) = (index(i)?, self::budget(budget)?);
    Ok(py.detach(|| hierarchy::f_eval(i, &n, b)).into())
}

/// `f_i` applied `l` times to `n`.
#[pyfunction]
#[pyo3(signature = (i, l, n, budget=None))]
fn f_iter(py: Python<'_>, i: u32, l: u64, n: BigUint, budget: Option<u64>) -> PyResult<PyEvalResult> {
    let (i, b) = (index(i)?, self::budget(budget)?);
    Ok(py.detach(|| hierarchy::f_iter(i, l, &n, b)).into())
}

/// `A_i(n)`.
#[pyfunction]
#[pyo3(signature = (i, n, budget=None))]
fn ack_eval(py: Python<'_>, i: u32, n: BigUint, budget: Option<u64>) -> PyResult<PyEvalResult> {
    let (i, b) = (index(i)?, self::budget(budget)?);
    Ok(py.detach(|| hierarchy::ack_eval(i, &n, b)).into())
}

/// `"yes"`, `"no"` or `"unknown"` for `f_i(n) >= threshold`.
#[pyfunction]
#[pyo3(signature = (i, n, threshold, budget=None))]
fn exceeds_threshold(i: u32, n: BigUint, threshold: BigUint, budget: Option<u64>) -> PyResult<&'static str> {
    Ok(match hierarchy::exceeds_threshold(index(i)?, &n, &threshold, self::budget(budget)?) {
        Verdict::Yes => "yes",
        Verdict::No => "no",
        Verdict::Unknown => "unknown",
    })
}

#[pyfunction]
fn isqrt_half(n: BigUint) -> BigUint {
    hierarchy::isqrt_half(&n)
}

#[pyfunction]
fn cantor_pair(m: u64, n: u64) -> PyResult<u64> {
    checked_cantor_pair(m, n).ok_or_else(|| value_error("code does not fit in 64 bits"))
}

#[pyfunction]
fn cantor_unpair(p: u64) -> (u64, u64) {
    regressive::cantor_unpair(p)
}

/// `(lo, hi)` of `[4k², f_k(4k²))`.
#[pyfunction]
#[pyo3(signature = (k, budget=None))]
fn interval(k: u32, budget: Option<u64>) -> PyResult<(u64, u64)> {
    let params = ConstructionParams::new(k).map_err(value_error)?;
    let iv = construction_interval(params, self::budget(budget)?).map_err(value_error)?;
    Ok((iv.lo, iv.hi))
}

fn outcome(o: SearchOutcome) -> (usize, Vec<u64>) {
    (o.max_size, o.witness.elements)
}

/// A pair coloring given by its domain and rows: `rows[i][j]` is the color
/// of `(domain[i], domain[i + 1 + j])`.
#[pyclass(name = "PairColoring", frozen)]
struct PyPairColoring(PairColoring);

#[pymethods]
impl PyPairColoring {
    #[new]
    fn new(domain: Vec<u64>, rows: Vec<Vec<u64>>) -> PyResult<Self> {
        PairColoring::from_rows(domain, &rows).map(PyPairColoring).map_err(value_error)
    }

    #[getter]
    fn domain(&self) -> Vec<u64> {
        self.0.domain().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn color(&self, m: u64, n: u64) -> PyResult<u64> {
        self.0.color(m, n).map_err(value_error)
    }

    fn is_regressive(&self) -> bool {
        self.0.is_regressive()
    }

    fn is_min_homogeneous(&self, s: Vec<u64>) -> PyResult<bool> {
        search::is_min_homogeneous(&self.0, &s).map_err(value_error)
    }

    /// `(size, elements)` of the lexicographically least largest
    /// min-homogeneous subset, by branch and bound.
    fn max_min_homog(&self, py: Python<'_>) -> (usize, Vec<u64>) {
        outcome(py.detach(|| search::max_min_homog(&self.0)))
    }

    /// Same answer as `max_min_homog` for sizes up to `cap`, by enumeration.
    fn brute_force_max(&self, py: Python<'_>, cap: usize) -> PyResult<(usize, Vec<u64>)> {
        py.detach(|| search::brute_force_max(&self.0, cap)).map(outcome).map_err(value_error)
    }

    /// Sets whose triples are all red (equivalently, min-homogeneous sets).
    #[pyo3(signature = (min_size=3, max_size=None))]
    fn red_homogeneous_sets(&self, min_size: usize, max_size: Option<usize>) -> Vec<Vec<u64>> {
        lift_to_triples(&self.0).homogeneous_sets(TripleColor::Red, min_size, max_size.unwrap_or(self.0.len()))
    }

    #[pyo3(signature = (max_set_size=None))]
    fn blue_bound_check<'py>(&self, py: Python<'py>, max_set_size: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
        let r = blue_bound_check(&self.0, max_set_size).map_err(value_error)?;
        let d = PyDict::new(py);
        d.set_item("blue_sets_examined", r.blue_sets_examined)?;
        d.set_item("max_excess", r.max_excess)?;
        d.set_item("violations", r.violations)?;
        d.set_item("repeated_row_colors", r.repeated_row_colors)?;
        Ok(d)
    }
}

/// The explicit coloring on `[4k², f_k(4k²))`, or on `[4k², cap]`.
#[pyclass(name = "Construction", frozen)]
struct PyConstruction(Construction);

#[pymethods]
impl PyConstruction {
    #[new]
    #[pyo3(signature = (k, cap=None, budget=None))]
    fn new(k: u32, cap: Option<u64>, budget: Option<u64>) -> PyResult<Self> {
        let params = ConstructionParams::new(k).map_err(value_error)?;
        let b = self::budget(budget)?;
        let c = match cap {
            Some(cap) => Construction::with_cap(params, cap, b),
            None => Construction::new(params, b),
        };
        c.map(PyConstruction).map_err(value_error)
    }

    #[getter]
    fn interval(&self) -> (u64, u64) {
        let iv = self.0.interval();
        (iv.lo, iv.hi)
    }

    #[getter]
    fn top_level(&self) -> u32 {
        self.0.top_level()
    }

    /// Rungs of the level ladder, for levels 2 up to `top_level`.
    fn ladder(&self, level: u32) -> Option<Vec<u64>> {
        self.0.ladder(level).map(|l| l.rungs.clone())
    }

    fn dist(&self, i: u32, m: u64, n: u64) -> PyResult<u64> {
        self.0.dist(index(i)?, m, n).map_err(value_error)
    }

    /// `(level, dist, color)`.
    fn classify(&self, m: u64, n: u64) -> PyResult<(u32, u64, u64)> {
        let c = self.0.classify(m, n).map_err(value_error)?;
        Ok((c.level, c.dist, c.encoded))
    }

    fn color(&self, m: u64, n: u64) -> PyResult<u64> {
        self.0.color(m, n).map_err(value_error)
    }

    fn verify_regressive<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = self.0.verify_regressive();
        let d = PyDict::new(py);
        d.set_item("pairs_checked", r.pairs_checked)?;
        d.set_item("violations", r.violations)?;
        d.set_item("max_color", r.max_color)?;
        d.set_item("code_bound_violations", r.code_bound_violations)?;
        Ok(d)
    }

    fn verify_sqrt_bound<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = self.0.verify_sqrt_bound();
        let d = PyDict::new(py);
        d.set_item("pairs_checked", r.pairs_checked)?;
        d.set_item("violations", r.violations)?;
        d.set_item("max_dist", r.max_dist)?;
        Ok(d)
    }

    fn to_pair_coloring(&self) -> PyPairColoring {
        PyPairColoring(self.0.to_pair_coloring())
    }
}

/// Outcome of deciding whether some regressive coloring of `{1..n}` avoids
/// min-homogeneous `k`-sets.
#[pyclass(name = "NuCertificate", frozen)]
struct PyNuCertificate(search::NuCertificate);

#[pymethods]
impl PyNuCertificate {
    #[getter]
    fn n(&self) -> u64 {
        self.0.n
    }

    #[getter]
    fn k(&self) -> u64 {
        self.0.k
    }

    #[getter]
    fn forced(&self) -> bool {
        self.0.is_forced()
    }

    #[getter]
    fn nodes_explored(&self) -> u64 {
        self.0.nodes_explored
    }

    /// Rows of the avoiding coloring of `{1..n}`, if one exists.
    #[getter]
    fn avoider(&self) -> Option<Vec<Vec<u32>>> {
        match &self.0.verdict {
            search::NuVerdict::AvoiderExists { rows } => Some(rows.clone()),
            search::NuVerdict::Forced(_) => None,
        }
    }

    /// Re-verifies an avoider by brute force; `None` for forced verdicts.
    fn recheck(&self) -> PyResult<Option<bool>> {
        self.0.recheck_avoider().transpose().map_err(value_error)
    }

    fn __repr__(&self) -> String {
        let verdict = if self.0.is_forced() { "forced" } else { "avoider" };
        format!("NuCertificate(n={}, k={}, {verdict})", self.0.n, self.0.k)
    }
}

fn nu_options(node_limit: Option<u64>, threads: usize) -> NuSearchOptions {
    NuSearchOptions { node_limit: node_limit.unwrap_or(DEFAULT_NODE_LIMIT), threads }
}

#[pyfunction]
#[pyo3(signature = (n, k, node_limit=None, threads=1))]
fn nu_decision(py: Python<'_>, n: u64, k: u64, node_limit: Option<u64>, threads: usize) -> PyResult<PyNuCertificate> {
    let opts = nu_options(node_limit, threads);
    py.detach(|| search::nu_decision(n, k, opts)).map(PyNuCertificate).map_err(value_error)
}

/// `ν(k)`, or `None` if every `N <= n_cap` admits an avoider.
#[pyfunction]
#[pyo3(signature = (k, n_cap, node_limit=None, threads=1))]
fn nu_value(py: Python<'_>, k: u64, n_cap: u64, node_limit: Option<u64>, threads: usize) -> PyResult<Option<u64>> {
    let opts = nu_options(node_limit, threads);
    py.detach(|| search::nu_value(k, n_cap, opts)).map(|v| v.value).map_err(value_error)
}

/// The avoidance CNF for colorings of `{1..n}` as DIMACS text.
#[pyfunction]
fn export_cnf(n: u32, k: u32) -> PyResult<String> {
    search::export_cnf(n, k).map(|d| d.to_dimacs()).map_err(value_error)
}

#[pymodule]
#[pyo3(name = "regressive")]
fn regressive_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEvalResult>()?;
    m.add_class::<PyPairColoring>()?;
    m.add_class::<PyConstruction>()?;
    m.add_class::<PyNuCertificate>()?;
    m.add_function(wrap_pyfunction!(f_eval, m)?)?;
    m.add_function(wrap_pyfunction!(f_iter, m)?)?;
    m.add_function(wrap_pyfunction!(ack_eval, m)?)?;
    m.add_function(wrap_pyfunction!(exceeds_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(isqrt_half, m)?)?;
    m.add_function(wrap_pyfunction!(cantor_pair, m)?)?;
    m.add_function(wrap_pyfunction!(cantor_unpair, m)?)?;
    m.add_function(wrap_pyfunction!(interval, m)?)?;
    m.add_function(wrap_pyfunction!(nu_decision, m)?)?;
    m.add_function(wrap_pyfunction!(nu_value, m)?)?;
    m.add_function(wrap_pyfunction!(export_cnf, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
