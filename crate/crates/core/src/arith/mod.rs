//! Exact integer arithmetic: factorization, multiplicative functions and
//! complete exponential sums.

pub mod exact;
mod expsum;
mod sieve;

pub use expsum::{
    kloosterman, kloosterman_square_average, kloosterman_square_average_closed, ramanujan_sum,
    ramanujan_sum_direct, weil_bound, weil_check, ExpSumValue, KloostermanTable,
};
pub use sieve::ArithTable;

use crate::{Error, Result};

/// `d = d1 * d2^2` with `d1` squarefree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SquarefreeSplit {
    pub d1: u64,
    pub d2: u64,
}

/// Prime factorization by trial division, primes in ascending order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5;
    while p * p <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn squarefree_decompose(d: u64) -> Result<SquarefreeSplit> {
    if d == 0 {
        return Err(Error::invalid("squarefree_decompose requires d >= 1"));
    }
    let (mut d1, mut d2) = (1u64, 1u64);
    for (p, e) in factorize(d) {
        if e % 2 == 1 {
            d1 *= p;
        }
        d2 *= p.pow(e / 2);
    }
    Ok(SquarefreeSplit { d1, d2 })
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    divisors_from_factors(&factorize(n))
}

pub fn divisors_from_factors(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &(p, e) in factors {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

pub fn mobius(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn num_divisors(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// `tau(n) = sum_{d | n^2} d1^{-1/2}`, evaluated through both of its
/// defining expressions; the second is `sum_{f | n} mu^2(f) f^{-1/2} d(n/f)`.
pub fn tau_star(n: u64) -> f64 {
    let (by_square, by_convolution) = tau_star_both(n);
    assert!(
        (by_square - by_convolution).abs() <= 1e-12 * by_square.abs().max(1.0),
        "tau({n}) expressions disagree: {by_square} vs {by_convolution}"
    );
    by_square
}

pub fn tau_star_both(n: u64) -> (f64, f64) {
    assert!(n >= 1, "tau_star requires n >= 1");
    let factors = factorize(n);
    let squared: Vec<(u64, u32)> = factors.iter().map(|&(p, e)| (p, 2 * e)).collect();
    let by_square = divisors_from_factors(&squared)
        .into_iter()
        .map(|d| {
            let d1 = squarefree_decompose(d).expect("d >= 1").d1;
            1.0 / (d1 as f64).sqrt()
        })
        .sum();
    let by_convolution = divisors_from_factors(&factors)
        .into_iter()
        .filter(|&f| is_squarefree(f))
        .map(|f| num_divisors(n / f) as f64 / (f as f64).sqrt())
        .sum();
    (by_square, by_convolution)
}

/// `tau(n)` from its Euler factors `tau(p^e) = (e + 1) + e p^{-1/2}`.
pub fn tau_star_multiplicative(n: u64) -> f64 {
    factorize(n)
        .iter()
        .map(|&(p, e)| (e + 1) as f64 + e as f64 / (p as f64).sqrt())
        .product()
}

/// `mu_*(j) = prod_{p | j} (-1 - p^{-1/2})` on squarefree `j`, zero otherwise.
pub fn mu_star(j: u64) -> f64 {
    assert!(j >= 1, "mu_star requires j >= 1");
    let f = factorize(j);
    if f.iter().any(|&(_, e)| e > 1) {
        return 0.0;
    }
    f.iter().map(|&(p, _)| -1.0 - 1.0 / (p as f64).sqrt()).product()
}

/// Generalized von Mangoldt function `sum_{d | n} mu(d) log^j(n/d)`.
pub fn gen_von_mangoldt(order: u32, n: u64) -> Result<f64> {
    if order > 4 {
        return Err(Error::invalid(format!("von Mangoldt order {order} exceeds 4")));
    }
    if n == 0 {
        return Err(Error::invalid("von Mangoldt argument must be >= 1"));
    }
    let factors = factorize(n);
    // only squarefree d contribute; enumerate subsets of the prime set
    let primes: Vec<u64> = factors.iter().map(|&(p, _)| p).collect();
    let mut total = 0.0;
    for mask in 0u32..(1 << primes.len()) {
        let mut d = 1u64;
        for (i, &p) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                d *= p;
            }
        }
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * ((n / d) as f64).ln().powi(order as i32);
    }
    Ok(total)
}

/// `sum_{j <= x} mu(j)^2 / phi(j)`.
pub fn sum_mu2_over_phi(table: &ArithTable, x: u64) -> f64 {
    crate::sum::compensated_sum((1..=x).filter_map(|j| {
        let mu = table.mobius(j);
        (mu != 0).then(|| 1.0 / table.phi(j) as f64)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_decompose(1).unwrap(), SquarefreeSplit { d1: 1, d2: 1 });
        assert_eq!(squarefree_decompose(12).unwrap(), SquarefreeSplit { d1: 3, d2: 2 });
        assert_eq!(squarefree_decompose(49).unwrap(), SquarefreeSplit { d1: 1, d2: 7 });
        assert!(squarefree_decompose(0).is_err());
    }

    #[test]
    fn squarefree_against_trial_oracle() {
        for d in 1..2000u64 {
            // largest square dividing d, found by brute force
            let d2 = (1..=d).rev().find(|s| d % (s * s) == 0).unwrap();
            let split = squarefree_decompose(d).unwrap();
            assert_eq!(split.d2, d2, "d = {d}");
            assert_eq!(split.d1 * split.d2 * split.d2, d);
            assert!(is_squarefree(split.d1));
        }
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau_star(1), 1.0);
        let t2 = 2.0 + 2f64.powf(-0.5);
        assert!((tau_star(2) - t2).abs() < 1e-15);
        // brute force over d | 36
        let brute: f64 = (1..=36u64)
            .filter(|d| 36 % d == 0)
            .map(|d| 1.0 / (squarefree_decompose(d).unwrap().d1 as f64).sqrt())
            .sum();
        let t3 = 2.0 + 3f64.powf(-0.5);
        assert!((tau_star(6) - brute).abs() < 1e-14);
        assert!((tau_star(6) - t2 * t3).abs() < 1e-14);
        for n in 1..500 {
            assert!((tau_star(n) - tau_star_multiplicative(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn mu_star_examples() {
        assert_eq!(mu_star(1), 1.0);
        assert!((mu_star(2) - (-1.0 - 2f64.powf(-0.5))).abs() < 1e-15);
        assert_eq!(mu_star(4), 0.0);
        assert_eq!(mu_star(12), 0.0);
    }

    #[test]
    fn von_mangoldt_examples() {
        assert_eq!(gen_von_mangoldt(0, 1).unwrap(), 1.0);
        assert_eq!(gen_von_mangoldt(0, 5).unwrap(), 0.0);
        assert!((gen_von_mangoldt(1, 8).unwrap() - 2f64.ln()).abs() < 1e-14);
        let direct = 2.0 * 2f64.ln() * 3f64.ln();
        assert!((gen_von_mangoldt(2, 6).unwrap() - direct).abs() < 1e-13);
        assert!(gen_von_mangoldt(5, 6).is_err());
    }

    #[test]
    fn von_mangoldt_support_and_convolution() {
        for n in 1..=500u64 {
            let omega = factorize(n).len() as u32;
            for j in 0..=4u32 {
                let v = gen_von_mangoldt(j, n).unwrap();
                if omega > j {
                    assert!(v.abs() < 1e-9, "Lambda_{j}({n}) = {v}");
                }
                let total: f64 = divisors(n).iter().map(|&d| gen_von_mangoldt(j, d).unwrap()).sum();
                assert!((total - (n as f64).ln().powi(j as i32)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn basic_functions() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(36), 12);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(18), 0);
        assert_eq!(num_divisors(36), 9);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(is_prime(97) && !is_prime(91) && !is_prime(1));
    }
}
