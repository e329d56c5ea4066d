//! Certificates: self-contained records of a verification or search run.
//!
//! Everything except the `run` section is a deterministic function of the
//! parameters and the crate version.

use std::time::Instant;

use regressive::coloring::{ColoringError, Construction, ConstructionParams, Interval};
use regressive::hierarchy::EvalBudget;
use regressive::reduction::{blue_bound_check, extract_min_homog, lift_to_triples, BlueBoundReport, TripleColor};
use regressive::search::{
    brute_force_max, max_min_homog, nu_decision, verify_sequence_bound, NuSearchOptions, NuVerdict, SearchError,
};
use regressive::MinHomogWitness;
use serde::Serialize;

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Construction,
    Nu,
    Reduction,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Construction => "construction",
            Kind::Nu => "nu",
            Kind::Reduction => "reduction",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Parameters {
    pub k: u64,
    pub cap: Option<u64>,
    pub n_cap: Option<u64>,
    pub budget: Option<u64>,
    pub node_limit: Option<u64>,
    pub max_set: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Status {
    /// False when a mandatory check ran out of budget or was not attempted.
    pub complete: bool,
    pub violations: u64,
    pub notes: Vec<String>,
}

impl Status {
    pub fn ok(&self) -> bool {
        self.complete && self.violations == 0
    }
}

/// Timing and counters that may differ between runs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunInfo {
    pub elapsed_ms: u64,
    pub threads: usize,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Results {
    Construction(Box<ConstructionResults>),
    Nu(NuResults),
    Reduction(Box<ReductionResults>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub kind: Kind,
    pub version: &'static str,
    pub parameters: Parameters,
    pub status: Status,
    pub results: Results,
    pub run: RunInfo,
}

impl Certificate {
    /// `kind_k3`, plus every non-default parameter in a fixed order.
    pub fn stem(&self) -> String {
        let p = &self.parameters;
        let mut name = format!("{}_k{}", self.kind.as_str(), p.k);
        let extra =
            [("cap", p.cap), ("ncap", p.n_cap), ("budget", p.budget), ("nodes", p.node_limit), ("maxset", p.max_set)];
        for (tag, v) in extra {
            if let Some(v) = v {
                name.push_str(&format!("_{tag}{v}"));
            }
        }
        name
    }

    pub fn to_machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificates serialize");
        s.push('\n');
        s
    }

    pub fn table_rows(&self) -> Vec<(String, String)> {
        let mut rows = vec![
            ("kind".to_string(), self.kind.as_str().to_string()),
            ("version".to_string(), self.version.to_string()),
            ("k".to_string(), self.parameters.k.to_string()),
        ];
        match &self.results {
            Results::Construction(r) => r.table_rows(&mut rows),
            Results::Nu(r) => r.table_rows(&mut rows),
            Results::Reduction(r) => r.table_rows(&mut rows),
        }
        rows.push(("complete".into(), self.status.complete.to_string()));
        rows.push(("violations".into(), self.status.violations.to_string()));
        for note in &self.status.notes {
            rows.push(("note".into(), note.clone()));
        }
        rows.push(("nodes explored".into(), self.run.nodes_explored.to_string()));
        rows.push(("elapsed ms".into(), self.run.elapsed_ms.to_string()));
        rows
    }
}

fn elapsed_ms(start: Instant) -> u64 {
    u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX)
}

fn show_list<T: std::fmt::Debug>(items: &[T]) -> String {
    match items.len() {
        0 => "none".into(),
        n if n <= 4 => format!("{items:?}"),
        n => format!("{n}, first {:?}", &items[..4]),
    }
}

fn show_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".into(), ToString::to_string)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    /// The whole interval `[4k², f_k(4k²))`.
    FullInterval,
    /// The prefix `[4k², cap]`.
    Prefix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntervalBound {
    /// `f_k(4k²)` is at least this.
    pub lower_bound: String,
    pub steps_used: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LadderSummary {
    pub level: u32,
    pub rungs: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BruteForceCheck {
    /// Subsets of every size up to `cap` were enumerated.
    pub cap: u64,
    pub max_size: Option<u64>,
    pub agrees: Option<bool>,
    pub subsets_checked: Option<u64>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceCheck {
    pub min_homogeneous_sets: u64,
    pub violations: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructionResults {
    pub scope: Scope,
    pub interval: Option<Interval>,
    pub interval_bound: Option<IntervalBound>,
    pub pairs_checked: u64,
    pub max_color: u64,
    pub max_dist: u64,
    pub regressive_violations: Vec<(u64, u64, u64)>,
    pub code_bound_violations: Vec<(u64, u64, u64)>,
    pub sqrt_bound_violations: Vec<(u64, u64, u64)>,
    pub ladders: Vec<LadderSummary>,
    pub max_min_homog: Option<u64>,
    pub witness: Option<MinHomogWitness>,
    pub brute_force: Option<BruteForceCheck>,
    pub sequence_check: Option<SequenceCheck>,
}

impl ConstructionResults {
    fn empty(scope: Scope) -> Self {
        ConstructionResults {
            scope,
            interval: None,
            interval_bound: None,
            pairs_checked: 0,
            max_color: 0,
            max_dist: 0,
            regressive_violations: Vec::new(),
            code_bound_violations: Vec::new(),
            sqrt_bound_violations: Vec::new(),
            ladders: Vec::new(),
            max_min_homog: None,
            witness: None,
            brute_force: None,
            sequence_check: None,
        }
    }

    fn table_rows(&self, rows: &mut Vec<(String, String)>) {
        let scope = match self.scope {
            Scope::FullInterval => "full interval",
            Scope::Prefix => "prefix",
        };
        rows.push(("scope".into(), scope.into()));
        let interval = self.interval.map_or_else(|| "-".into(), |iv| format!("[{}, {})", iv.lo, iv.hi));
        rows.push(("interval".into(), interval));
        if let Some(b) = &self.interval_bound {
            rows.push(("f_k(4k^2) lower bound".into(), format!("{} after {} steps", b.lower_bound, b.steps_used)));
        }
        rows.push(("pairs checked".into(), self.pairs_checked.to_string()));
        rows.push(("max color".into(), self.max_color.to_string()));
        rows.push(("max distance".into(), self.max_dist.to_string()));
        rows.push(("regressive violations".into(), show_list(&self.regressive_violations)));
        rows.push(("code bound violations".into(), show_list(&self.code_bound_violations)));
        rows.push(("sqrt bound violations".into(), show_list(&self.sqrt_bound_violations)));
        for l in &self.ladders {
            rows.push((format!("ladder {}", l.level), show_list(&l.rungs)));
        }
        rows.push(("max min-homogeneous".into(), show_opt(&self.max_min_homog)));
        if let Some(w) = &self.witness {
            rows.push(("witness".into(), format!("{:?}", w.elements)));
        }
        if let Some(b) = &self.brute_force {
            let v = match (&b.skipped, b.agrees) {
                (Some(why), _) => format!("skipped: {why}"),
                (None, Some(agrees)) => {
                    format!("cap {}, max {}, agrees {agrees}", b.cap, show_opt(&b.max_size))
                }
                _ => "-".into(),
            };
            rows.push(("brute force".into(), v));
        }
        if let Some(s) = &self.sequence_check {
            rows.push((
                "sequence check".into(),
                format!("{} sets, violations {}", s.min_homogeneous_sets, show_list(&s.violations)),
            ));
        }
    }
}

fn coloring_err(e: ColoringError) -> CliError {
    CliError::Invalid(e.to_string())
}

/// Verifies the construction for `k`: regressiveness, the distance bound,
/// and the absence of min-homogeneous `(k+1)`-sets, with a brute-force
/// cross-check of the branch-and-bound maximum.
pub fn cmd_certify(k: u32, cap: Option<u64>, budget: u64, threads: usize) -> Result<Certificate, CliError> {
    let start = Instant::now();
    let params = ConstructionParams::new(k).map_err(coloring_err)?;
    let eval_budget = EvalBudget::new(budget).map_err(|e| CliError::Invalid(e.to_string()))?;
    let parameters = Parameters {
        k: u64::from(k),
        cap,
        budget: (budget != regressive::hierarchy::DEFAULT_MAX_STEPS).then_some(budget),
        ..Parameters::default()
    };
    let scope = if cap.is_some() { Scope::Prefix } else { Scope::FullInterval };
    let mut results = ConstructionResults::empty(scope);
    let mut status = Status { complete: true, violations: 0, notes: Vec::new() };
    let mut run = RunInfo { threads, ..RunInfo::default() };
    let built = match cap {
        Some(cap) => Construction::with_cap(params, cap, eval_budget),
        None => Construction::new(params, eval_budget),
    };
    let c = match built {
        Ok(c) => c,
        Err(ColoringError::IntervalBudget { lower_bound, steps }) => {
            results.interval_bound = Some(IntervalBound { lower_bound: lower_bound.to_string(), steps_used: steps });
            status.complete = false;
            status.notes.push("f_k(4k^2) not evaluable within budget; rerun with --cap for a prefix".into());
            run.elapsed_ms = elapsed_ms(start);
            return Ok(Certificate {
                kind: Kind::Construction,
                version: VERSION,
                parameters,
                status,
                results: Results::Construction(Box::new(results)),
                run,
            });
        }
        Err(e) => return Err(coloring_err(e)),
    };
    results.interval = Some(c.interval());
    results.ladders = (2..=c.top_level())
        .filter_map(|l| c.ladder(l))
        .map(|l| LadderSummary { level: l.level.get(), rungs: l.rungs.clone() })
        .collect();

    let reg = c.verify_regressive();
    let sqrt = c.verify_sqrt_bound();
    results.pairs_checked = reg.pairs_checked;
    results.max_color = reg.max_color;
    results.max_dist = sqrt.max_dist;
    results.regressive_violations = reg.violations;
    results.code_bound_violations = reg.code_bound_violations;
    results.sqrt_bound_violations = sqrt.violations;

    let pc = c.to_pair_coloring();
    let bnb = max_min_homog(&pc);
    run.nodes_explored = bnb.nodes_explored;
    results.max_min_homog = Some(bnb.max_size as u64);
    let too_big = bnb.max_size > k as usize;
    let brute_cap = k as usize + 1;
    results.brute_force = Some(match brute_force_max(&pc, brute_cap) {
        Ok(b) => BruteForceCheck {
            cap: brute_cap as u64,
            max_size: Some(b.max_size as u64),
            agrees: Some(
                b.max_size == bnb.max_size.min(brute_cap) && (bnb.max_size > brute_cap || b.witness == bnb.witness),
            ),
            subsets_checked: Some(b.nodes_explored),
            skipped: None,
        },
        Err(SearchError::TooManySubsets { .. }) if scope == Scope::Prefix => BruteForceCheck {
            cap: brute_cap as u64,
            max_size: None,
            agrees: None,
            subsets_checked: None,
            skipped: Some("too many subsets for the prefix".into()),
        },
        Err(e) => return Err(CliError::Invalid(e.to_string())),
    });
    results.witness = Some(bnb.witness);
    let seq = verify_sequence_bound(&c);
    results.sequence_check = Some(SequenceCheck { min_homogeneous_sets: seq.sets_checked, violations: seq.violations });

    let brute_disagrees = results.brute_force.as_ref().is_some_and(|b| b.agrees == Some(false));
    status.violations = (results.regressive_violations.len()
        + results.code_bound_violations.len()
        + results.sqrt_bound_violations.len()
        + results.sequence_check.as_ref().map_or(0, |s| s.violations.len())) as u64
        + u64::from(too_big)
        + u64::from(brute_disagrees);
    if too_big {
        status.notes.push(format!("min-homogeneous set of size {} > k", bnb.max_size));
    }
    if brute_disagrees {
        status.notes.push("brute force disagrees with branch and bound".into());
    }
    run.elapsed_ms = elapsed_ms(start);
    Ok(Certificate {
        kind: Kind::Construction,
        version: VERSION,
        parameters,
        status,
        results: Results::Construction(Box::new(results)),
        run,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NuDecision {
    pub n: u64,
    pub forced: bool,
    /// `rows[x-1][j]` is `c(x, x+1+j)`.
    pub avoider: Option<Vec<Vec<u32>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NuResults {
    /// `ν(k)`, when some `N <= n_cap` is forced.
    pub value: Option<u64>,
    /// Largest `N` shown to admit an avoider, so `ν(k) > N`.
    pub exceeds: Option<u64>,
    pub decisions: Vec<NuDecision>,
    pub avoiders_rechecked: u64,
    pub recheck_failures: Vec<u64>,
    /// The `N` at which the node limit ran out.
    pub node_limit_hit_at: Option<u64>,
}

impl NuResults {
    fn table_rows(&self, rows: &mut Vec<(String, String)>) {
        rows.push(("nu(k)".into(), show_opt(&self.value)));
        rows.push(("nu(k) exceeds".into(), show_opt(&self.exceeds)));
        for d in &self.decisions {
            let v = match &d.avoider {
                Some(rows) => format!("avoider {rows:?}"),
                None => "forced".into(),
            };
            rows.push((format!("N = {}", d.n), v));
        }
        rows.push(("avoiders rechecked".into(), self.avoiders_rechecked.to_string()));
        if let Some(n) = self.node_limit_hit_at {
            rows.push(("node limit hit at".into(), format!("N = {n}")));
        }
    }
}

/// Sweeps `N` upward from `max(1, k-1)` to `n_cap` and stops at the first
/// forced `N`. Each avoider is rechecked by brute force.
pub fn cmd_nu(k: u64, n_cap: u64, node_limit: u64, threads: usize) -> Result<Certificate, CliError> {
    let start = Instant::now();
    let opts = NuSearchOptions { node_limit, threads };
    let mut results = NuResults {
        value: None,
        exceeds: None,
        decisions: Vec::new(),
        avoiders_rechecked: 0,
        recheck_failures: Vec::new(),
        node_limit_hit_at: None,
    };
    let mut run = RunInfo { threads, ..RunInfo::default() };
    let mut notes = Vec::new();
    for n in k.saturating_sub(1).max(1)..=n_cap {
        let cert = match nu_decision(n, k, opts) {
            Ok(cert) => cert,
            Err(SearchError::NodeLimit { .. }) => {
                results.node_limit_hit_at = Some(n);
                notes.push(format!("node limit {node_limit} reached at N = {n}"));
                break;
            }
            Err(e) => return Err(CliError::Invalid(e.to_string())),
        };
        run.nodes_explored += cert.nodes_explored;
        if let Some(check) = cert.recheck_avoider() {
            results.avoiders_rechecked += 1;
            if check != Ok(true) {
                results.recheck_failures.push(n);
            }
        }
        let avoider = match &cert.verdict {
            NuVerdict::AvoiderExists { rows } => Some(rows.clone()),
            NuVerdict::Forced(_) => None,
        };
        let forced = avoider.is_none();
        results.decisions.push(NuDecision { n, forced, avoider });
        if forced {
            results.value = Some(n);
            break;
        }
        results.exceeds = Some(n);
    }
    if results.value.is_none() && results.node_limit_hit_at.is_none() {
        notes.push(format!("every N <= {n_cap} admits an avoider"));
    }
    let status = Status {
        complete: results.node_limit_hit_at.is_none(),
        violations: results.recheck_failures.len() as u64,
        notes,
    };
    run.elapsed_ms = elapsed_ms(start);
    Ok(Certificate {
        kind: Kind::Nu,
        version: VERSION,
        parameters: Parameters {
            k,
            n_cap: Some(n_cap),
            node_limit: (node_limit != regressive::search::DEFAULT_NODE_LIMIT).then_some(node_limit),
            ..Parameters::default()
        },
        status,
        results: Results::Nu(results),
        run,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionResults {
    pub interval: Interval,
    /// Red-homogeneous sets with at least three elements.
    pub red_sets: u64,
    pub witnesses_verified: u64,
    pub invalid_witnesses: Vec<Vec<u64>>,
    pub blue: BlueBoundReport,
}

impl ReductionResults {
    fn table_rows(&self, rows: &mut Vec<(String, String)>) {
        rows.push(("interval".into(), format!("[{}, {})", self.interval.lo, self.interval.hi)));
        rows.push(("red-homogeneous sets".into(), self.red_sets.to_string()));
        rows.push(("witnesses verified".into(), self.witnesses_verified.to_string()));
        rows.push(("invalid witnesses".into(), show_list(&self.invalid_witnesses)));
        rows.push(("blue sets examined".into(), self.blue.blue_sets_examined.to_string()));
        rows.push(("max |A| - min A".into(), show_opt(&self.blue.max_excess)));
        rows.push(("blue size violations".into(), show_list(&self.blue.violations)));
        rows.push(("blue repeated row colors".into(), show_list(&self.blue.repeated_row_colors)));
    }
}

/// Lifts the construction's coloring to triples and checks both local
/// lemmas: red sets are min-homogeneous, blue sets are small.
pub fn cmd_reduction(k: u32, budget: u64, max_set: Option<usize>) -> Result<Certificate, CliError> {
    let start = Instant::now();
    let params = ConstructionParams::new(k).map_err(coloring_err)?;
    let eval_budget = EvalBudget::new(budget).map_err(|e| CliError::Invalid(e.to_string()))?;
    let c = Construction::new(params, eval_budget).map_err(coloring_err)?;
    let pc = c.to_pair_coloring();
    let lifted = lift_to_triples(&pc);
    let mut results = ReductionResults {
        interval: c.interval(),
        red_sets: 0,
        witnesses_verified: 0,
        invalid_witnesses: Vec::new(),
        blue: blue_bound_check(&pc, max_set).map_err(|e| CliError::Invalid(e.to_string()))?,
    };
    for a in lifted.homogeneous_sets(TripleColor::Red, 3, pc.len()) {
        results.red_sets += 1;
        match extract_min_homog(&a, &pc) {
            Ok(w) if w.verify(&pc) => results.witnesses_verified += 1,
            _ => results.invalid_witnesses.push(a),
        }
    }
    let violations =
        results.invalid_witnesses.len() + results.blue.violations.len() + results.blue.repeated_row_colors.len();
    let mut notes = Vec::new();
    if let Some(m) = max_set {
        notes.push(format!("blue search capped at {m} elements"));
    }
    Ok(Certificate {
        kind: Kind::Reduction,
        version: VERSION,
        parameters: Parameters {
            k: u64::from(k),
            budget: (budget != regressive::hierarchy::DEFAULT_MAX_STEPS).then_some(budget),
            max_set: max_set.map(|m| m as u64),
            ..Parameters::default()
        },
        status: Status { complete: true, violations: violations as u64, notes },
        results: Results::Reduction(Box::new(results)),
        run: RunInfo { elapsed_ms: elapsed_ms(start), threads: 1, nodes_explored: 0 },
    })
}
