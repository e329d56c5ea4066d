//! DIMACS CNF encoding of "some regressive coloring of `{1..N}` has no
//! min-homogeneous `k`-set".
//!
//! Variables:
//! * `color(x, y, c)` for `x < y`, `c < x`: pair `{x, y}` gets color `c`
//!   (one-hot; only regressive colors get a variable).
//! * `eq(x, y, z)` for `x < y < z`: `c(x, y) = c(x, z)`.
//!
//! Clauses:
//! * per pair, at least one admissible color and at most one color;
//! * per triple and color, `eq` is defined by two-literal equivalences;
//! * per `k`-set `s_0 < ... < s_{k-1}`, some row is not constant:
//!   `OR_{j, i >= j+2} !eq(s_j, s_{j+1}, s_i)`.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::{PairColoring, SearchError};

/// Upper limit on clauses [`export_cnf`] will build.
pub const MAX_CNF_CLAUSES: u128 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CnfVariable {
    Color { x: u32, y: u32, color: u32 },
    Equal { x: u32, y: u32, z: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfDocument {
    pub n: u32,
    pub k: u32,
    /// `variables[v - 1]` describes DIMACS variable `v`.
    pub variables: Vec<CnfVariable>,
    pub clauses: Vec<Vec<i32>>,
    index: HashMap<CnfVariable, i32>,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn estimated_clauses(n: u128, k: u128) -> u128 {
    let pairs: u128 = (1..=n).map(|x| (n - x) * (1 + binomial(x, 2))).sum();
    let triples: u128 = (1..=n).map(|x| binomial(n - x, 2) * 3 * x).sum();
    pairs + triples + binomial(n, k)
}

impl CnfDocument {
    fn empty(n: u32, k: u32) -> Self {
        CnfDocument { n, k, variables: Vec::new(), clauses: Vec::new(), index: HashMap::new() }
    }

    fn add_var(&mut self, v: CnfVariable) -> i32 {
        self.variables.push(v);
        let id = self.variables.len() as i32;
        self.index.insert(v, id);
        id
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn var(&self, v: CnfVariable) -> Option<i32> {
        self.index.get(&v).copied()
    }

    fn color_var(&self, x: u32, y: u32, color: u32) -> i32 {
        self.index[&CnfVariable::Color { x, y, color }]
    }

    fn eq_var(&self, x: u32, y: u32, z: u32) -> i32 {
        self.index[&CnfVariable::Equal { x, y, z }]
    }

    /// Renders the document: comment lines with the variable map, the
    /// `p cnf` header, then one `0`-terminated clause per line.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        writeln!(out, "c regressive-avoid n={} k={}", self.n, self.k).unwrap();
        for (i, v) in self.variables.iter().enumerate() {
            match v {
                CnfVariable::Color { x, y, color } => writeln!(out, "c var {} color {x} {y} {color}", i + 1),
                CnfVariable::Equal { x, y, z } => writeln!(out, "c var {} eq {x} {y} {z}", i + 1),
            }
            .unwrap();
        }
        writeln!(out, "p cnf {} {}", self.variables.len(), self.clauses.len()).unwrap();
        for clause in &self.clauses {
            for lit in clause {
                write!(out, "{lit} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parses text produced by [`CnfDocument::to_dimacs`].
    pub fn parse_dimacs(text: &str) -> Result<Self, SearchError> {
        let bad = |msg: String| SearchError::Dimacs(msg);
        let num = |s: Option<&str>, what: &str| -> Result<u32, SearchError> {
            s.and_then(|t| t.parse().ok()).ok_or_else(|| bad(format!("expected {what}")))
        };
        let mut doc: Option<CnfDocument> = None;
        let mut header: Option<(usize, usize)> = None;
        let mut pending: Vec<i32> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("c ") {
                let mut w = rest.split_whitespace();
                match w.next() {
                    Some("regressive-avoid") => {
                        let n = num(w.next().and_then(|t| t.strip_prefix("n=")), "n=")?;
                        let k = num(w.next().and_then(|t| t.strip_prefix("k=")), "k=")?;
                        doc = Some(CnfDocument::empty(n, k));
                    }
                    Some("var") => {
                        let d = doc.as_mut().ok_or_else(|| bad("variable before preamble".into()))?;
                        let id = num(w.next(), "variable id")? as usize;
                        let kind = w.next();
                        let (a, b, c) = (num(w.next(), "index")?, num(w.next(), "index")?, num(w.next(), "index")?);
                        let v = match kind {
                            Some("color") => CnfVariable::Color { x: a, y: b, color: c },
                            Some("eq") => CnfVariable::Equal { x: a, y: b, z: c },
                            _ => return Err(bad(format!("unknown variable kind in {line:?}"))),
                        };
                        if id != d.variables.len() + 1 {
                            return Err(bad(format!("variable {id} out of order")));
                        }
                        d.add_var(v);
                    }
                    _ => {}
                }
                continue;
            }
            if line == "c" {
                continue;
            }
            if let Some(rest) = line.strip_prefix("p cnf ") {
                let mut w = rest.split_whitespace();
                header = Some((num(w.next(), "variable count")? as usize, num(w.next(), "clause count")? as usize));
                continue;
            }
            let d = doc.as_mut().ok_or_else(|| bad("clause before preamble".into()))?;
            if header.is_none() {
                return Err(bad("clause before header".into()));
            }
            for tok in line.split_whitespace() {
                let lit: i32 = tok.parse().map_err(|_| bad(format!("bad literal {tok:?}")))?;
                if lit == 0 {
                    d.clauses.push(std::mem::take(&mut pending));
                } else {
                    pending.push(lit);
                }
            }
        }
        let doc = doc.ok_or_else(|| bad("missing preamble".into()))?;
        let (vars, clauses) = header.ok_or_else(|| bad("missing header".into()))?;
        if !pending.is_empty() {
            return Err(bad("unterminated clause".into()));
        }
        if vars != doc.variables.len() || clauses != doc.clauses.len() {
            return Err(bad(format!(
                "header says {vars} vars / {clauses} clauses, found {} / {}",
                doc.variables.len(),
                doc.clauses.len()
            )));
        }
        Ok(doc)
    }

    /// Index of the first clause falsified by `assignment`, where
    /// `assignment[v - 1]` is the value of variable `v`.
    pub fn first_violated(&self, assignment: &[bool]) -> Option<usize> {
        let value = |lit: i32| {
            let v = assignment.get(lit.unsigned_abs() as usize - 1).copied().unwrap_or(false);
            if lit > 0 {
                v
            } else {
                !v
            }
        };
        self.clauses.iter().position(|c| !c.iter().any(|&l| value(l)))
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.variables.len() && self.first_violated(assignment).is_none()
    }

    /// The full assignment induced by a regressive coloring of `{1..N}`.
    pub fn encode_coloring(&self, c: &PairColoring) -> Result<Vec<bool>, SearchError> {
        let expected: Vec<u64> = (1..=u64::from(self.n)).collect();
        if c.domain() != expected.as_slice() {
            return Err(SearchError::Decode(format!("coloring domain is not {{1..{}}}", self.n)));
        }
        if let Some((m, n, col)) = c.regressive_violation() {
            return Err(SearchError::Decode(format!("pair ({m}, {n}) has color {col}")));
        }
        let col = |x: u32, y: u32| c.color(u64::from(x), u64::from(y)).unwrap();
        Ok(self
            .variables
            .iter()
            .map(|v| match *v {
                CnfVariable::Color { x, y, color } => col(x, y) == u64::from(color),
                CnfVariable::Equal { x, y, z } => col(x, y) == col(x, z),
            })
            .collect())
    }

    /// Reads the coloring off the color variables of an assignment.
    pub fn decode(&self, assignment: &[bool]) -> Result<PairColoring, SearchError> {
        if assignment.len() != self.variables.len() {
            return Err(SearchError::Decode(format!(
                "assignment has {} values for {} variables",
                assignment.len(),
                self.variables.len()
            )));
        }
        let n = self.n;
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for x in 1..=n {
            let mut row = Vec::new();
            for y in x + 1..=n {
                let on: Vec<u32> = (0..x).filter(|&c| assignment[self.color_var(x, y, c) as usize - 1]).collect();
                match on.as_slice() {
                    [c] => row.push(u64::from(*c)),
                    _ => return Err(SearchError::Decode(format!("pair ({x}, {y}) has colors {on:?}"))),
                }
            }
            rows.push(row);
        }
        PairColoring::from_rows((1..=u64::from(n)).collect(), &rows)
    }
}

/// Builds the avoidance CNF for `N` points and min-homogeneous sets of size `k`.
pub fn export_cnf(n: u32, k: u32) -> Result<CnfDocument, SearchError> {
    if n < 2 || k < 2 {
        return Err(SearchError::BadParameter(format!("need N >= 2 and k >= 2, got N={n}, k={k}")));
    }
    let estimate = estimated_clauses(u128::from(n), u128::from(k));
    if estimate > MAX_CNF_CLAUSES {
        return Err(SearchError::CnfTooLarge { clauses: estimate, limit: MAX_CNF_CLAUSES });
    }
    let mut doc = CnfDocument::empty(n, k);
    for x in 1..=n {
        for y in x + 1..=n {
            for color in 0..x {
                doc.add_var(CnfVariable::Color { x, y, color });
            }
        }
    }
    for x in 1..=n {
        for y in x + 1..=n {
            for z in y + 1..=n {
                doc.add_var(CnfVariable::Equal { x, y, z });
            }
        }
    }

    let mut clauses = Vec::new();
    for x in 1..=n {
        for y in x + 1..=n {
            let vars: Vec<i32> = (0..x).map(|c| doc.color_var(x, y, c)).collect();
            clauses.push(vars.clone());
            for (i, &a) in vars.iter().enumerate() {
                for &b in &vars[i + 1..] {
                    clauses.push(vec![-a, -b]);
                }
            }
        }
    }
    for x in 1..=n {
        for y in x + 1..=n {
            for z in y + 1..=n {
                let e = doc.eq_var(x, y, z);
                for c in 0..x {
                    let (p, q) = (doc.color_var(x, y, c), doc.color_var(x, z, c));
                    clauses.push(vec![-p, -q, e]);
                    clauses.push(vec![-e, -p, q]);
                    clauses.push(vec![-e, p, -q]);
                }
            }
        }
    }
    let k = k as usize;
    let mut s: Vec<u32> = (1..=k as u32).collect();
    if k as u32 <= n {
        loop {
            let mut clause = Vec::new();
            for j in 0..k.saturating_sub(2) {
                for i in j + 2..k {
                    clause.push(-doc.eq_var(s[j], s[j + 1], s[i]));
                }
            }
            clauses.push(clause);
            let Some(p) = (0..k).rev().find(|&p| s[p] < n - (k - 1 - p) as u32) else { break };
            s[p] += 1;
            for q in p + 1..k {
                s[q] = s[q - 1] + 1;
            }
        }
    }
    doc.clauses = clauses;
    Ok(doc)
}
