use num_complex::Complex64;
use proptest::prelude::*;
use std::collections::BTreeMap;

use symsq_core::arith::{
    divisors, factorize, gen_von_mangoldt, is_squarefree, kloosterman, mobius, ramanujan_sum_direct,
    squarefree_decompose, tau_star_both, tau_star_multiplicative, weil_bound, KloostermanTable,
};
use symsq_core::cache::format_decimal;
use symsq_core::mollifier::{proportion, quad_form_brute, quad_form_diag, x_from_y, y_from_x, MollifierSpec};
use symsq_core::report::round_significant;
use symsq_core::specfun::{bessel_j_all, ln_gamma, zeta};
use symsq_core::sum::{compensated_sum, pairwise_sum};

fn squarefree_vector(m: u64) -> impl Strategy<Value = BTreeMap<u64, f64>> {
    let support: Vec<u64> = (1..=m).filter(|&r| is_squarefree(r)).collect();
    proptest::collection::vec(prop_oneof![Just(0.0), -3.0..3.0f64], support.len()).prop_map(move |vals| {
        support.iter().zip(vals).filter(|(_, v)| *v != 0.0).map(|(&r, v)| (r, v)).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn squarefree_split(d in 1u64..1_000_000) {
        let s = squarefree_decompose(d).unwrap();
        prop_assert_eq!(s.d1 * s.d2 * s.d2, d);
        prop_assert!(is_squarefree(s.d1));
    }

    #[test]
    fn factorization_and_mobius(n in 1u64..100_000, m in 1u64..100_000) {
        let prod: u64 = factorize(n).iter().map(|&(p, e)| p.pow(e)).product();
        prop_assert_eq!(prod, n);
        if num_integer::gcd(n, m) == 1 {
            prop_assert_eq!(mobius(n * m), mobius(n) * mobius(m));
        }
        let s: i32 = divisors(n).into_iter().map(mobius).sum();
        prop_assert_eq!(s, if n == 1 { 1 } else { 0 });
    }

    #[test]
    fn tau_routes(n in 1u64..50_000) {
        let (a, b) = tau_star_both(n);
        prop_assert!((a - b).abs() <= 1e-12 * a);
        prop_assert!((a - tau_star_multiplicative(n)).abs() <= 1e-12 * a);
    }

    #[test]
    fn kloosterman_symmetry_and_weil(n in -60i64..60, m in -60i64..60, c in 1u64..150) {
        let t = KloostermanTable::new(c);
        let s = t.sum(n, m);
        prop_assert!((s.value - t.sum(m, n).value).abs() < 1e-9);
        prop_assert!((s.value - kloosterman(n + c as i64, m, c).value).abs() < 1e-9);
        prop_assert!(s.value.abs() <= weil_bound(n, m, c) * (1.0 + 1e-12) + 1e-9);
        prop_assert!((t.sum(n, 0).value - ramanujan_sum_direct(c, n)).abs() < 1e-9);
    }

    #[test]
    fn von_mangoldt_support(j in 1u32..=4, n in 2u64..5000) {
        let omega = factorize(n).len() as u32;
        let v = gen_von_mangoldt(j, n).unwrap();
        if omega > j {
            prop_assert!(v.abs() < 1e-8);
        } else {
            prop_assert!(v > -1e-8);
        }
    }

    #[test]
    fn mollifier_transforms(x in squarefree_vector(40)) {
        prop_assume!(!x.is_empty());
        let y = y_from_x(&x, 40).unwrap();
        let back = x_from_y(&y, 40).unwrap();
        for (r, v) in &back {
            prop_assert!((v - x.get(r).copied().unwrap_or(0.0)).abs() < 1e-12);
        }
        let brute = quad_form_brute(&x, 40).unwrap();
        let diag = quad_form_diag(&y).unwrap();
        prop_assert!(diag >= 0.0);
        prop_assert!((brute - diag).abs() <= 1e-10 * brute.abs().max(1e-12));
    }

    #[test]
    fn proportion_range(a in 1e-6..0.5f64) {
        let p = proportion(a);
        prop_assert!(p > 0.0 && p < 19.0 / 27.0);
        prop_assert!(proportion(a * 0.9) < p);
    }

    #[test]
    fn spec_json_round_trip(k in 20.0..500.0f64, a in 0.01..0.49f64) {
        let spec = MollifierSpec::trivial(k, a, &Default::default());
        prop_assert_eq!(MollifierSpec::from_json(&spec.to_json().unwrap()).unwrap(), spec);
    }

    #[test]
    fn decimal_strings(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(format_decimal(x).parse::<f64>().unwrap(), x);
        let r = round_significant(x);
        prop_assert_eq!(round_significant(r), r);
        prop_assert!((r - x).abs() <= 5e-15 * x.abs());
    }

    #[test]
    fn gamma_recurrence(re in 0.1..30.0f64, im in -30.0..30.0f64) {
        let z = Complex64::new(re, im);
        let lhs = (ln_gamma(z + 1.0).unwrap() - ln_gamma(z).unwrap()).exp();
        prop_assert!((lhs - z).norm() <= 1e-11 * z.norm());
    }

    #[test]
    fn zeta_conjugation(re in -3.0..4.0f64, im in 0.5..20.0f64) {
        let s = Complex64::new(re, im);
        let (a, b) = (zeta(s).unwrap(), zeta(s.conj()).unwrap());
        prop_assert!((a.conj() - b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn bessel_three_term(x in 0.1..200.0f64) {
        let j = bessel_j_all(60, x).unwrap();
        for n in 1..60 {
            let lhs = j[n - 1] + j[n + 1];
            let rhs = 2.0 * n as f64 / x * j[n];
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (j[n - 1].abs() + j[n + 1].abs()).max(1e-300) + 1e-14);
        }
    }

    #[test]
    fn summation_orders(xs in proptest::collection::vec(-1e6..1e6f64, 1..200)) {
        let naive: f64 = xs.iter().sum();
        let scale: f64 = xs.iter().map(|x| x.abs()).sum();
        prop_assert!((compensated_sum(xs.iter().copied()) - naive).abs() <= 1e-12 * scale.max(1.0));
        prop_assert!((pairwise_sum(&xs) - naive).abs() <= 1e-12 * scale.max(1.0));
    }
}
