//! Ordered-method sequences and the addition-method alpha values.

mod common;

use std::sync::OnceLock;

use common::q;
use num_bigint::BigInt;
use pithresh_core::lp::solve;
use pithresh_core::numerics::harmonic;
use pithresh_core::sequences::{alpha, build_alpha_lp, seq_a, seq_b, seq_c, SequenceCache, DEFAULT_ALPHA_CAP};
use pithresh_core::{Rational, WeightScheme};
use proptest::prelude::*;

const N_MAX: usize = 200;

fn b_table() -> &'static Vec<Rational> {
    static B: OnceLock<Vec<Rational>> = OnceLock::new();
    B.get_or_init(|| {
        let mut cache = SequenceCache::default();
        (1..=N_MAX).map(|n| cache.b(n).unwrap()).collect()
    })
}

fn alpha_harmonic() -> &'static Vec<Rational> {
    static A: OnceLock<Vec<Rational>> = OnceLock::new();
    A.get_or_init(|| (1..=6).map(|n| alpha(n, &WeightScheme::Harmonic).unwrap()).collect())
}

/// `[z^k] 1/C(z)` where `-(1-z) log(1-z) = z C(z)`, so that `b_n` is the
/// coefficient of `z^(n-1)`.
fn taylor_b(count: usize) -> Vec<Rational> {
    let c: Vec<Rational> = (0..count)
        .map(|k| if k == 0 { Rational::one() } else { Rational::ratio(1, k as i64 + 1) - Rational::ratio(1, k as i64) })
        .collect();
    let mut d: Vec<Rational> = Vec::with_capacity(count);
    for k in 0..count {
        let mut acc = if k == 0 { Rational::one() } else { Rational::zero() };
        for j in 1..=k {
            acc -= &(c[j].clone() * &d[k - j]);
        }
        d.push(acc);
    }
    d
}

#[test]
fn published_sequence_table() {
    let a = ["1", "3/2", "23/12", "55/24", "1901/720", "4277/1440"];
    let b = ["1", "1/2", "5/12", "3/8", "251/720", "95/288"];
    let c = [1, 2, 4, 6, 9, 12];
    for n in 1..=6 {
        assert_eq!(seq_a(n).unwrap(), q(a[n - 1]), "a_{n}");
        assert_eq!(seq_b(n).unwrap(), q(b[n - 1]), "b_{n}");
        assert_eq!(seq_c(n).unwrap(), BigInt::from(c[n - 1]), "c_{n}");
    }
}

#[test]
fn zero_index_is_rejected() {
    assert!(seq_a(0).is_err());
    assert!(seq_b(0).is_err());
    assert!(seq_c(0).is_err());
}

#[test]
fn harmonic_numbers() {
    assert_eq!(harmonic(1), Rational::one());
    assert_eq!(harmonic(2), q("3/2"));
    let direct: Rational = (1..=5).map(|i| Rational::ratio(1, i)).sum();
    assert_eq!(harmonic(5), direct);
    assert_eq!(harmonic(5), q("137/60"));
    for n in 1..N_MAX {
        assert_eq!(harmonic(n + 1) - harmonic(n), Rational::ratio(1, n as i64 + 1));
    }
}

#[test]
fn recursion_matches_series_coefficients() {
    let series = taylor_b(50);
    for n in 1..=50 {
        assert_eq!(b_table()[n - 1], series[n - 1], "b_{n}");
    }
}

#[test]
fn a_is_prefix_sum_and_subadditive() {
    let b = b_table();
    let a: Vec<Rational> = b
        .iter()
        .scan(Rational::zero(), |acc, x| {
            *acc = acc.clone() + x;
            Some(acc.clone())
        })
        .collect();
    for n in 1..=40 {
        assert_eq!(seq_a(n).unwrap(), a[n - 1]);
        if n > 1 {
            assert!(a[n - 1] >= a[n - 2]);
        }
    }
    for m in 1..40 {
        for n in 1..=40 - m {
            assert!(a[m + n - 1] <= a[m - 1].clone() + &a[n - 1], "a_{}", m + n);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn b_satisfies_the_defining_identity(n in 1usize..=N_MAX) {
        let b = b_table();
        let total: Rational = (1..=n).map(|i| b[i - 1].clone() / Rational::from_usize(n + 1 - i)).sum();
        prop_assert_eq!(total, Rational::one());
    }

    #[test]
    fn b_is_strictly_decreasing_in_unit_interval(n in 1usize..N_MAX) {
        let b = b_table();
        prop_assert!(b[n] < b[n - 1]);
        prop_assert!(b[n].is_positive() && b[n - 1] <= Rational::one());
    }
}

#[test]
fn alpha_small_values_are_exact() {
    let got = alpha_harmonic();
    for (n, want) in ["1", "2", "8/3", "24/7"].iter().enumerate() {
        assert_eq!(got[n], q(want), "alpha_{}", n + 1);
    }
}

#[test]
fn alpha_five_and_six_match_published_decimals() {
    let got = alpha_harmonic();
    assert!((got[4].to_f64() - 4.186).abs() <= 0.005, "alpha_5 = {}", got[4]);
    assert!((got[5].to_f64() - 4.90).abs() <= 0.005, "alpha_6 = {}", got[5]);
    assert!(got[5] <= q("29952/6103"));
}

#[test]
fn alpha_bounds_monotonicity_and_subadditivity() {
    let a = alpha_harmonic();
    for n in 1..=6 {
        let x = &a[n - 1];
        assert!(Rational::from_usize(n) / harmonic(n) <= *x, "alpha_{n} lower");
        assert!(*x <= Rational::from_usize(n), "alpha_{n} upper");
        if (3..=5).contains(&n) {
            assert!(*x < Rational::from_usize(n));
        }
        if n < 6 {
            assert!(a[n - 1] <= a[n] && a[n] <= a[n - 1].clone() + Rational::one());
        }
    }
    for m in 1..6 {
        for n in 1..=6 - m {
            assert!(a[m + n - 1] <= a[m - 1].clone() + &a[n - 1]);
        }
    }
}

#[test]
fn alpha_for_other_weights() {
    for n in 1..=6 {
        assert_eq!(alpha(n, &WeightScheme::Weak).unwrap(), Rational::from_usize(n));
    }
    let w = WeightScheme::explicit(vec![Rational::one(), q("3/4")], q("3/4")).unwrap();
    assert_eq!(alpha(2, &w).unwrap(), q("4/3"));
}

#[test]
fn alpha_programs_pass_the_duality_audit() {
    for n in 1..=4 {
        let lp = build_alpha_lp(n, &WeightScheme::Harmonic, DEFAULT_ALPHA_CAP).unwrap();
        let primal = solve(&lp).unwrap();
        let dual = solve(&lp.dual().unwrap()).unwrap();
        let p = primal.value().unwrap().clone();
        assert_eq!(-dual.value().unwrap().clone(), p, "n = {n}");
        if let pithresh_core::lp::LpOutcome::Optimal { point, .. } = &primal {
            assert!(lp.is_feasible(point));
            assert_eq!(lp.objective_at(point), p);
        }
    }
}

#[test]
fn alpha_program_over_cap_is_refused() {
    assert!(build_alpha_lp(DEFAULT_ALPHA_CAP + 1, &WeightScheme::Harmonic, DEFAULT_ALPHA_CAP).is_err());
}
