#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regressive::PairColoring;

/// `⌊√n⌋` by binary search, independent of the library's root routine.
pub fn isqrt_oracle(n: u64) -> u64 {
    let (mut lo, mut hi) = (0u64, n.min(1 << 32) + 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if mid * mid <= n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A seeded random regressive coloring on at most `max_len` points.
///
/// Palettes are kept small so min-homogeneous sets of size 4-6 show up.
pub fn random_regressive(seed: u64, min_len: usize, max_len: usize) -> PairColoring {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.gen_range(min_len..=max_len);
    let mut domain: Vec<u64> = Vec::new();
    while domain.len() < len {
        let x = rng.gen_range(1..=3 * max_len as u64);
        if !domain.contains(&x) {
            domain.push(x);
        }
    }
    domain.sort_unstable();
    let palette = rng.gen_range(1..=4u64);
    PairColoring::from_fn(domain, |x, _| rng.gen_range(0..x.min(palette))).unwrap()
}

/// Brute-force search for all pairs in a coloring, used to double-check
/// min-homogeneity with nothing but the public `color` lookup.
pub fn naive_is_min_homogeneous(c: &PairColoring, s: &[u64]) -> bool {
    s.iter().enumerate().all(|(i, &x)| {
        let row: Vec<u64> = s[i + 1..].iter().map(|&y| c.color(x, y).unwrap()).collect();
        row.windows(2).all(|w| w[0] == w[1])
    })
}

/// Plain DPLL with unit propagation; returns a model if satisfiable.
pub fn dpll(num_vars: usize, clauses: &[Vec<i32>]) -> Option<Vec<bool>> {
    let mut assign: Vec<Option<bool>> = vec![None; num_vars];
    if solve(clauses, &mut assign) {
        Some(assign.into_iter().map(|v| v.unwrap_or(false)).collect())
    } else {
        None
    }
}

fn lit_value(assign: &[Option<bool>], lit: i32) -> Option<bool> {
    assign[lit.unsigned_abs() as usize - 1].map(|v| if lit > 0 { v } else { !v })
}

fn solve(clauses: &[Vec<i32>], assign: &mut Vec<Option<bool>>) -> bool {
    let saved = assign.clone();
    loop {
        let mut changed = false;
        for clause in clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut sat = false;
            for &lit in clause {
                match lit_value(assign, lit) {
                    Some(true) => {
                        sat = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        open += 1;
                        unassigned = Some(lit);
                    }
                }
            }
            if sat {
                continue;
            }
            match (open, unassigned) {
                (0, _) => {
                    *assign = saved;
                    return false;
                }
                (1, Some(lit)) => {
                    assign[lit.unsigned_abs() as usize - 1] = Some(lit > 0);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let Some(var) = assign.iter().position(Option::is_none) else {
        return true;
    };
    for value in [true, false] {
        assign[var] = Some(value);
        if solve(clauses, assign) {
            return true;
        }
        assign[var] = None;
    }
    *assign = saved;
    false
}
