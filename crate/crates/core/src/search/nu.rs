//! Exact small regressive Ramsey numbers.
//!
//! `ν(k)` is the least `N` such that every regressive coloring of the pairs
//! of `{1..N}` has a min-homogeneous subset of size `k`. Whether a subset is
//! min-homogeneous depends only on how each row is partitioned into color
//! classes, never on the color names, so the search enumerates each row as
//! a restricted-growth string with at most `x` blocks for row `x` (colors of
//! row `x` lie in `0..x`).

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use super::{brute_force_max, PairColoring, SearchError};

/// Largest `N` the bitset-based backtracker supports.
pub const MAX_NU_DOMAIN: u64 = 127;

pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;

const FLUSH_EVERY: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NuSearchOptions {
    pub node_limit: u64,
    /// Worker threads; 0 picks the rayon default, 1 runs sequentially.
    pub threads: usize,
}

impl Default for NuSearchOptions {
    fn default() -> Self {
        NuSearchOptions { node_limit: DEFAULT_NODE_LIMIT, threads: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ForcedStats {
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum NuVerdict {
    /// A regressive coloring of `{1..N}` with no min-homogeneous `k`-set.
    /// `rows[x - 1]` is the restricted-growth string of row `x`.
    AvoiderExists {
        rows: Vec<Vec<u32>>,
    },
    Forced(ForcedStats),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NuCertificate {
    pub n: u64,
    pub k: u64,
    #[serde(flatten)]
    pub verdict: NuVerdict,
    pub nodes_explored: u64,
}

impl NuCertificate {
    pub fn is_forced(&self) -> bool {
        matches!(self.verdict, NuVerdict::Forced(_))
    }

    /// The avoiding coloring on `{1..N}`, if one was found.
    pub fn avoider(&self) -> Option<PairColoring> {
        match &self.verdict {
            NuVerdict::AvoiderExists { rows } => Some(rows_to_coloring(self.n, rows)),
            NuVerdict::Forced(_) => None,
        }
    }

    /// Rechecks an avoider by brute force: regressive and without a
    /// min-homogeneous `k`-set. Forced certificates return `None`.
    pub fn recheck_avoider(&self) -> Option<Result<bool, SearchError>> {
        let c = self.avoider()?;
        if !c.is_regressive() {
            return Some(Ok(false));
        }
        Some(brute_force_max(&c, self.k as usize).map(|o| (o.max_size as u64) < self.k))
    }
}

fn rows_to_coloring(n: u64, rows: &[Vec<u32>]) -> PairColoring {
    let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&b| u64::from(b)).collect()).collect();
    PairColoring::from_rows((1..=n).collect(), &rows).expect("rows have the right shape")
}

fn zero_rows(n: u64) -> Vec<Vec<u32>> {
    (1..=n).map(|x| vec![0; (n - x) as usize]).collect()
}

fn check_params(n: u64, k: u64) -> Result<(), SearchError> {
    if n == 0 || k == 0 {
        return Err(SearchError::BadParameter(format!("need N >= 1 and k >= 1, got N={n}, k={k}")));
    }
    if n > MAX_NU_DOMAIN {
        return Err(SearchError::DomainTooLarge { n, max: MAX_NU_DOMAIN });
    }
    Ok(())
}

/// Backtracking state. Pairs are colored column by column: for `y = 2..=N`,
/// rows `x = 1..y` in increasing order. Once `c(x, y)` is set, every
/// `k`-set whose two largest elements are `x < y` is fully colored and is
/// checked immediately.
#[derive(Clone)]
struct State {
    k: usize,
    order: std::sync::Arc<Vec<(usize, usize)>>,
    /// `color[x][y]`, block index within row `x`.
    color: Vec<Vec<u8>>,
    /// Blocks used so far in each row.
    blocks: Vec<u8>,
    /// `class[x][b]`: bitset of `y` with `c(x, y) = b`.
    class: Vec<Vec<u128>>,
    depth: usize,
}

fn below(y: usize) -> u128 {
    (1u128 << y) - 1
}

impl State {
    fn new(n: usize, k: usize) -> Self {
        let order = (2..=n).flat_map(|y| (1..y).map(move |x| (x, y))).collect();
        State {
            k,
            order: std::sync::Arc::new(order),
            color: vec![vec![0; n + 1]; n + 1],
            blocks: vec![0; n + 1],
            class: (0..=n).map(|x| vec![0; x]).collect(),
            depth: 0,
        }
    }

    fn done(&self) -> bool {
        self.depth == self.order.len()
    }

    fn choices(&self) -> std::ops::Range<u8> {
        let (x, _) = self.order[self.depth];
        let open = (self.blocks[x] as usize + 1).min(x);
        0..open as u8
    }

    fn assign(&mut self, b: u8) {
        let (x, y) = self.order[self.depth];
        self.color[x][y] = b;
        if b == self.blocks[x] {
            self.blocks[x] += 1;
        }
        self.class[x][b as usize] |= 1u128 << y;
        self.depth += 1;
    }

    fn unassign(&mut self) {
        self.depth -= 1;
        let (x, y) = self.order[self.depth];
        let b = self.color[x][y];
        self.class[x][b as usize] &= !(1u128 << y);
        if self.class[x][b as usize] == 0 {
            self.blocks[x] -= 1;
        }
    }

    /// Successors `b < y` of `a` sharing `a`'s color to `y`.
    fn agree(&self, a: usize, y: usize) -> u128 {
        self.class[a][self.color[a][y] as usize] & below(y)
    }

    /// Whether the last assignment `c(x, y)` completed a min-homogeneous
    /// `k`-set with top two elements `x < y`.
    fn completes_k_set(&self) -> bool {
        let (x, y) = self.order[self.depth - 1];
        if self.k < 3 {
            return true;
        }
        let mut pool = 0u128;
        for a in 1..x {
            if self.agree(a, y) >> x & 1 == 1 {
                pool |= 1u128 << a;
            }
        }
        self.has_chain(pool, self.k - 2, y)
    }

    /// A subset of `pool` of the given size in which every element's color
    /// to each later element equals its color to `y`.
    fn has_chain(&self, pool: u128, need: usize, y: usize) -> bool {
        if need == 0 {
            return true;
        }
        let mut rest = pool;
        while rest.count_ones() as usize >= need {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if self.has_chain(rest & self.agree(a, y), need - 1, y) {
                return true;
            }
        }
        false
    }

    fn rows(&self, n: usize) -> Vec<Vec<u32>> {
        (1..=n).map(|x| (x + 1..=n).map(|y| u32::from(self.color[x][y])).collect()).collect()
    }
}

struct Counter<'a> {
    global: &'a AtomicU64,
    stop: &'a AtomicBool,
    limit: u64,
    local: u64,
}

impl Counter<'_> {
    fn tick(&mut self) -> Result<(), SearchError> {
        self.local += 1;
        if self.local == FLUSH_EVERY {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<(), SearchError> {
        let total = self.global.fetch_add(self.local, Ordering::Relaxed) + self.local;
        self.local = 0;
        if total > self.limit || self.stop.load(Ordering::Relaxed) {
            self.stop.store(true, Ordering::Relaxed);
            return Err(SearchError::NodeLimit { limit: self.limit });
        }
        Ok(())
    }
}

/// Depth-first search for an avoider below the current state.
fn dfs(state: &mut State, counter: &mut Counter<'_>) -> Result<bool, SearchError> {
    if state.done() {
        return Ok(true);
    }
    for b in state.choices() {
        counter.tick()?;
        state.assign(b);
        if !state.completes_k_set() && dfs(state, counter)? {
            return Ok(true);
        }
        state.unassign();
    }
    Ok(false)
}

/// Expands the search breadth-first (in search order) until there are at
/// least `want` open subtrees or the tree is exhausted.
fn split(root: State, want: usize) -> (Vec<State>, u64) {
    let mut frontier = vec![root];
    let mut nodes = 0;
    while frontier.len() < want && frontier.iter().any(|s| !s.done()) {
        let mut next = Vec::new();
        for s in frontier {
            if s.done() {
                next.push(s);
                continue;
            }
            for b in s.choices() {
                nodes += 1;
                let mut child = s.clone();
                child.assign(b);
                if !child.completes_k_set() {
                    next.push(child);
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    (frontier, nodes)
}

/// Decides whether some regressive coloring of `{1..N}` avoids
/// min-homogeneous `k`-sets. The returned avoider is the first one in
/// search order, whatever the thread count.
pub fn nu_decision(n: u64, k: u64, opts: NuSearchOptions) -> Result<NuCertificate, SearchError> {
    check_params(n, k)?;
    let cert = |verdict, nodes_explored| NuCertificate { n, k, verdict, nodes_explored };
    if n < k {
        return Ok(cert(NuVerdict::AvoiderExists { rows: zero_rows(n) }, 0));
    }
    if k <= 2 {
        return Ok(cert(NuVerdict::Forced(ForcedStats { nodes_explored: 0 }), 0));
    }
    let (nu, ku) = (n as usize, k as usize);
    let global = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let counter = || Counter { global: &global, stop: &stop, limit: opts.node_limit, local: 0 };

    let found = if opts.threads == 1 {
        let mut state = State::new(nu, ku);
        let mut c = counter();
        let hit = dfs(&mut state, &mut c)?;
        c.flush()?;
        hit.then(|| state.rows(nu))
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| SearchError::BadParameter(e.to_string()))?;
        let workers = pool.current_num_threads();
        let (subtrees, split_nodes) = split(State::new(nu, ku), workers * 64);
        global.fetch_add(split_nodes, Ordering::Relaxed);
        let result = pool.install(|| {
            subtrees.into_par_iter().find_map_first(|mut s| {
                let mut c = counter();
                match dfs(&mut s, &mut c).and_then(|hit| c.flush().map(|_| hit)) {
                    Ok(true) => Some(Ok(s.rows(nu))),
                    Ok(false) => None,
                    Err(e) => Some(Err(e)),
                }
            })
        });
        result.transpose()?
    };
    let nodes = global.load(Ordering::Relaxed);
    Ok(match found {
        Some(rows) => cert(NuVerdict::AvoiderExists { rows }, nodes),
        None => cert(NuVerdict::Forced(ForcedStats { nodes_explored: nodes }), nodes),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NuValue {
    pub k: u64,
    /// `ν(k)`, or `None` if every `N <= n_cap` admits an avoider.
    pub value: Option<u64>,
    /// One certificate per `N` examined, in increasing order.
    pub certificates: Vec<NuCertificate>,
}

/// Least `N <= n_cap` at which min-homogeneous `k`-sets are forced.
///
/// The sweep starts at `N = max(1, k - 1)` and stops at the first forced
/// `N`, since a forced set persists when the domain grows.
pub fn nu_value(k: u64, n_cap: u64, opts: NuSearchOptions) -> Result<NuValue, SearchError> {
    let mut out = NuValue { k, value: None, certificates: Vec::new() };
    for n in k.saturating_sub(1).max(1)..=n_cap {
        let cert = nu_decision(n, k, opts)?;
        let forced = cert.is_forced();
        out.certificates.push(cert);
        if forced {
            out.value = Some(n);
            break;
        }
    }
    Ok(out)
}

/// Restricted-growth strings of a given length with at most `max_blocks`
/// blocks, in lexicographic order.
#[derive(Debug, Clone)]
pub struct RowPartitions {
    current: Option<Vec<u32>>,
    max_blocks: u32,
}

impl RowPartitions {
    pub fn new(len: usize, max_blocks: u32) -> Self {
        let current = (len == 0 || max_blocks > 0).then(|| vec![0; len]);
        RowPartitions { current, max_blocks }
    }
}

impl Iterator for RowPartitions {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.clone()?;
        let cur = self.current.as_mut().unwrap();
        let mut prefix_max = Vec::with_capacity(cur.len());
        let mut m = 0;
        for &v in cur.iter() {
            m = m.max(v);
            prefix_max.push(m);
        }
        let bump = (1..cur.len()).rev().find(|&i| cur[i] <= prefix_max[i - 1] && cur[i] + 1 < self.max_blocks);
        match bump {
            Some(i) => {
                cur[i] += 1;
                cur[i + 1..].iter_mut().for_each(|v| *v = 0);
            }
            None => self.current = None,
        }
        Some(out)
    }
}

/// Every canonical regressive coloring of `{1..N}`: one restricted-growth
/// string per row, row `x` having at most `x` blocks.
#[derive(Debug, Clone)]
pub struct CanonicalColorings {
    options: Vec<Vec<Vec<u32>>>,
    odometer: Option<Vec<usize>>,
}

impl CanonicalColorings {
    pub fn new(n: u64) -> Self {
        let options: Vec<Vec<Vec<u32>>> =
            (1..=n).map(|x| RowPartitions::new((n - x) as usize, x as u32).collect()).collect();
        CanonicalColorings { odometer: Some(vec![0; options.len()]), options }
    }
}

impl Iterator for CanonicalColorings {
    type Item = Vec<Vec<u32>>;

    fn next(&mut self) -> Option<Vec<Vec<u32>>> {
        let odo = self.odometer.as_mut()?;
        let rows = odo.iter().zip(&self.options).map(|(&i, opts)| opts[i].clone()).collect();
        // Last row varies fastest.
        match (0..odo.len()).rev().find(|&r| odo[r] + 1 < self.options[r].len()) {
            Some(r) => {
                odo[r] += 1;
                odo[r + 1..].iter_mut().for_each(|v| *v = 0);
            }
            None => self.odometer = None,
        }
        Some(rows)
    }
}

/// Full enumeration without pruning: every canonical coloring of `{1..N}`
/// is checked for a min-homogeneous `k`-set by brute force.
pub fn nu_decision_exhaustive(n: u64, k: u64) -> Result<NuCertificate, SearchError> {
    check_params(n, k)?;
    let mut seen = 0;
    for rows in CanonicalColorings::new(n) {
        seen += 1;
        let c = rows_to_coloring(n, &rows);
        if (brute_force_max(&c, k as usize)?.max_size as u64) < k {
            return Ok(NuCertificate { n, k, verdict: NuVerdict::AvoiderExists { rows }, nodes_explored: seen });
        }
    }
    Ok(NuCertificate { n, k, verdict: NuVerdict::Forced(ForcedStats { nodes_explored: seen }), nodes_explored: seen })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> NuSearchOptions {
        NuSearchOptions::default()
    }

    #[test]
    fn trivial_decisions() {
        let c = nu_decision(2, 3, opts()).unwrap();
        assert!(!c.is_forced());
        assert_eq!(c.recheck_avoider(), Some(Ok(true)));
        assert!(nu_decision(2, 2, opts()).unwrap().is_forced());
        assert!(nu_decision(1, 1, opts()).unwrap().is_forced());
        assert!(nu_decision(0, 3, opts()).is_err());
        assert!(matches!(nu_decision(200, 3, opts()), Err(SearchError::DomainTooLarge { .. })));
    }

    #[test]
    fn small_values() {
        assert_eq!(nu_value(1, 10, opts()).unwrap().value, Some(1));
        assert_eq!(nu_value(2, 10, opts()).unwrap().value, Some(2));
        assert_eq!(nu_value(3, 10, opts()).unwrap().value, Some(3));
        assert_eq!(nu_value(4, 10, opts()).unwrap().value, Some(5));
        assert_eq!(nu_value(4, 4, opts()).unwrap().value, None);
    }

    #[test]
    fn four_avoider_on_four_points() {
        let c = nu_decision(4, 4, opts()).unwrap();
        assert_eq!(c.recheck_avoider(), Some(Ok(true)));
    }

    #[test]
    fn row_partition_counts() {
        // Bell numbers, and two-block truncations 2^(len-1).
        let count = |len, b| RowPartitions::new(len, b).count();
        assert_eq!(count(4, 4), 15);
        assert_eq!(count(5, 5), 52);
        assert_eq!(count(6, 2), 32);
        assert_eq!(count(3, 1), 1);
        assert_eq!(count(0, 3), 1);
        let all: Vec<_> = RowPartitions::new(3, 3).collect();
        assert_eq!(all, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1], vec![0, 1, 2]]);
    }

    #[test]
    fn canonical_coloring_counts() {
        assert_eq!(CanonicalColorings::new(1).count(), 1);
        assert_eq!(CanonicalColorings::new(6).count(), 8 * 5 * 2);
    }

    #[test]
    fn node_limit_is_enforced() {
        let tight = NuSearchOptions { node_limit: 10, threads: 1 };
        assert_eq!(nu_decision(9, 5, tight), Err(SearchError::NodeLimit { limit: 10 }));
    }

    #[test]
    fn threads_agree_with_sequential() {
        for (n, k) in [(4, 4), (5, 4), (7, 5), (8, 5)] {
            let seq = nu_decision(n, k, opts()).unwrap();
            let par = nu_decision(n, k, NuSearchOptions { threads: 4, ..opts() }).unwrap();
            assert_eq!(seq.verdict.clone_without_stats(), par.verdict.clone_without_stats(), "N={n} k={k}");
        }
    }

    impl NuVerdict {
        fn clone_without_stats(&self) -> Option<Vec<Vec<u32>>> {
            match self {
                NuVerdict::AvoiderExists { rows } => Some(rows.clone()),
                NuVerdict::Forced(_) => None,
            }
        }
    }
}
