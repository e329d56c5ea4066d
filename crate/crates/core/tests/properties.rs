mod common;

use num_bigint::BigUint;
use proptest::prelude::*;
use regressive::coloring::{cantor_pair, cantor_unpair, Construction, ConstructionParams};
use regressive::hierarchy::{f_eval, f_iter, isqrt_half, EvalBudget, HierarchyIndex};
use regressive::reduction::{lift_to_triples, TripleColor};
use regressive::search::{
    brute_force_max, export_cnf, is_min_homogeneous, max_min_homog, nu_decision, nu_decision_exhaustive,
    NuSearchOptions, PairColoring,
};

fn idx(i: u32) -> HierarchyIndex {
    HierarchyIndex::new(i).unwrap()
}

fn exact(i: u32, l: u64, n: u64) -> BigUint {
    f_iter(idx(i), l, &BigUint::from(n), EvalBudget::default()).exact().cloned().unwrap()
}

proptest! {
    #[test]
    fn isqrt_half_matches_oracle(n in 0u64..u64::MAX) {
        prop_assert_eq!(isqrt_half(&BigUint::from(n)), BigUint::from(common::isqrt_oracle(n) / 2));
    }

    #[test]
    fn pairing_round_trips(m in 0u64..1 << 31, n in 0u64..1 << 31) {
        prop_assert_eq!(cantor_unpair(cantor_pair(m, n)), (m, n));
    }

    #[test]
    fn unpairing_round_trips(p in 0u64..u64::MAX / 2) {
        let (m, n) = cantor_unpair(p);
        prop_assert_eq!(cantor_pair(m, n), p);
    }

    #[test]
    fn iterates_compose(i in 1u32..=3, a in 0u64..4, b in 0u64..4, n in 0u64..5000) {
        let once = exact(i, a, n);
        let twice = f_iter(idx(i), b, &once, EvalBudget::default()).exact().cloned().unwrap();
        prop_assert_eq!(twice, exact(i, a + b, n));
    }

    #[test]
    fn levels_dominate(i in 1u32..=3, n in 4u64..3000) {
        let lo = exact(i, 1, n);
        let hi = exact(i + 1, 1, n);
        prop_assert!(lo <= hi);
        prop_assert!(BigUint::from(n) < lo);
    }

    #[test]
    fn strictly_increasing_above_three(i in 1u32..=3, n in 4u64..3000) {
        prop_assert!(exact(i, 1, n) < exact(i, 1, n + 1));
    }

    #[test]
    fn budget_results_are_lower_bounds(i in 2u32..=4, n in 16u64..200, steps in 1u64..50) {
        let full = f_eval(idx(i), &BigUint::from(n), EvalBudget::new(1 << 40).unwrap());
        let cut = f_eval(idx(i), &BigUint::from(n), EvalBudget::new(steps).unwrap());
        if let Some(v) = full.exact() {
            prop_assert!(&cut.value <= v);
            if cut.is_exact() {
                prop_assert_eq!(&cut.value, v);
            }
        }
    }

    #[test]
    fn search_matches_brute_force(seed in any::<u64>()) {
        let c = common::random_regressive(seed, 1, 11);
        let bnb = max_min_homog(&c);
        let brute = brute_force_max(&c, c.len()).unwrap();
        prop_assert_eq!(bnb.max_size, brute.max_size);
        prop_assert_eq!(&bnb.witness, &brute.witness);
        prop_assert!(common::naive_is_min_homogeneous(&c, &bnb.witness.elements));
    }

    #[test]
    fn min_homogeneity_is_hereditary(seed in any::<u64>(), drop in any::<prop::sample::Index>()) {
        let c = common::random_regressive(seed, 3, 12);
        let w = max_min_homog(&c).witness.elements;
        let mut sub = w.clone();
        sub.remove(drop.index(sub.len()));
        prop_assert!(is_min_homogeneous(&c, &sub).unwrap());
    }

    #[test]
    fn row_relabeling_preserves_search(seed in any::<u64>(), shift in 1u64..5) {
        // Renaming colors within each row (any injective map) keeps the
        // min-homogeneous sets, so the maximum is unchanged.
        let c = common::random_regressive(seed, 2, 11);
        let relabeled = PairColoring::from_fn(c.domain().to_vec(), |x, y| {
            let v = c.color(x, y).unwrap();
            (v + shift * x) % (x + 3 * shift * x)
        }).unwrap();
        prop_assert_eq!(max_min_homog(&c).witness, {
            let w = max_min_homog(&relabeled).witness;
            regressive::reduction::extract_min_homog(&w.elements, &c).unwrap()
        });
    }

    #[test]
    fn red_sets_are_min_homogeneous(seed in any::<u64>()) {
        let c = common::random_regressive(seed, 3, 10);
        let t = lift_to_triples(&c);
        for s in t.homogeneous_sets(TripleColor::Red, 3, 5) {
            prop_assert!(common::naive_is_min_homogeneous(&c, &s));
        }
    }

    #[test]
    fn constructions_color_regressively(k in 3u32..=6, extra in 0u64..150) {
        let params = ConstructionParams::new(k).unwrap();
        let c = Construction::with_cap(params, params.base() + extra, EvalBudget::default()).unwrap();
        prop_assert!(c.verify_regressive().violations.is_empty());
        prop_assert!(c.verify_sqrt_bound().violations.is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pruned_nu_agrees_with_enumeration(n in 1u64..=6, k in 1u64..=5) {
        let fast = nu_decision(n, k, NuSearchOptions::default()).unwrap();
        let full = nu_decision_exhaustive(n, k).unwrap();
        prop_assert_eq!(fast.is_forced(), full.is_forced());
        if let Some(r) = fast.recheck_avoider() {
            prop_assert_eq!(r, Ok(true));
        }
    }

    #[test]
    fn cnf_agrees_with_direct_check(seed in any::<u64>(), n in 2u32..=6, k in 3u32..=4) {
        // A random coloring of {1..N} satisfies the CNF iff it avoids
        // min-homogeneous k-sets.
        let c = PairColoring::from_fn((1..=u64::from(n)).collect(), |x, y| {
            seed.rotate_left((x * 7 + y) as u32) % x
        }).unwrap();
        let doc = export_cnf(n, k).unwrap();
        let assignment = doc.encode_coloring(&c).unwrap();
        let avoids = max_min_homog(&c).max_size < k as usize;
        prop_assert_eq!(doc.is_satisfied_by(&assignment), avoids);
        prop_assert_eq!(doc.decode(&assignment).unwrap(), c);
    }
}
