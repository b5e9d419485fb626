use num_integer::Integer;
use std::f64::consts::TAU;

use super::{euler_phi, mobius, num_divisors};

const IMAG_TOLERANCE: f64 = 1e-9;

/// A complete exponential sum projected to the reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpSumValue {
    pub value: f64,
    /// Imaginary part of the complex sum before projection.
    pub imag_residue: f64,
}

impl ExpSumValue {
    fn project(re: f64, im: f64) -> Self {
        assert!(
            im.abs() <= IMAG_TOLERANCE * re.abs().max(1.0),
            "complete exponential sum has imaginary residue {im}"
        );
        ExpSumValue { value: re, imag_residue: im }
    }
}

/// Units modulo `c` with their inverses and a table of `e(j/c)`.
///
/// Reused across all `(n, m)` for a fixed modulus.
#[derive(Debug, Clone)]
pub struct KloostermanTable {
    c: u64,
    pairs: Vec<(u64, u64)>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl KloostermanTable {
    pub fn new(c: u64) -> Self {
        assert!(c >= 1, "modulus must be positive");
        let ci = c as i64;
        let pairs = (0..c)
            .filter_map(|g| {
                let eg = (g as i64).extended_gcd(&ci);
                (eg.gcd == 1).then(|| (g, eg.x.rem_euclid(ci) as u64))
            })
            .collect();
        let (sin, cos) = (0..c)
            .map(|j| (TAU * j as f64 / c as f64).sin_cos())
            .unzip();
        KloostermanTable { c, pairs, cos, sin }
    }

    pub fn modulus(&self) -> u64 {
        self.c
    }

    /// Units `(gamma, gamma^{-1})` modulo `c`.
    pub fn units(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    /// `e(j/c)` for a residue `j`.
    pub fn unit_root(&self, j: u64) -> (f64, f64) {
        let j = (j % self.c) as usize;
        (self.cos[j], self.sin[j])
    }

    pub fn sum(&self, n: i64, m: i64) -> ExpSumValue {
        let c = self.c as i64;
        let n = n.rem_euclid(c) as u64;
        let m = m.rem_euclid(c) as u64;
        let (mut re, mut im) = (0.0, 0.0);
        for &(g, gi) in &self.pairs {
            let j = ((n as u128 * g as u128 + m as u128 * gi as u128) % self.c as u128) as usize;
            re += self.cos[j];
            im += self.sin[j];
        }
        ExpSumValue::project(re, im)
    }
}

/// `S(n, m; c)`.
pub fn kloosterman(n: i64, m: i64, c: u64) -> ExpSumValue {
    KloostermanTable::new(c).sum(n, m)
}

/// `r_c(n)` by the closed form, after checking it against the direct sum.
pub fn ramanujan_sum(c: u64, n: i64) -> ExpSumValue {
    assert!(c >= 1, "modulus must be positive");
    let g = (n.unsigned_abs()).gcd(&c);
    let q = c / g;
    let closed = mobius(q) as f64 * euler_phi(c) as f64 / euler_phi(q) as f64;
    let direct = ramanujan_sum_direct(c, n);
    assert!(
        (closed - direct).abs() <= 1e-9 * closed.abs().max(1.0),
        "Ramanujan sum r_{c}({n}): closed form {closed} vs direct {direct}"
    );
    ExpSumValue { value: closed, imag_residue: 0.0 }
}

/// `r_c(n) = sum_{a mod c, (a,c)=1} e(an/c)` summed directly.
pub fn ramanujan_sum_direct(c: u64, n: i64) -> f64 {
    KloostermanTable::new(c).sum(n, 0).value
}

/// `sum_{a mod c} S(a^2, b^2; c) e(2ab/c)` as a direct double sum.
pub fn kloosterman_square_average(b: u64, c: u64) -> f64 {
    assert!(b >= 1 && c >= 1);
    let t = KloostermanTable::new(c);
    let cm = c as u128;
    let b = b as u128 % cm;
    let b2 = b * b % cm;
    let (mut re, mut im) = (0.0, 0.0);
    for a in 0..c as u128 {
        let a2 = a * a % cm;
        let shift = 2 * a * b % cm;
        for &(g, gi) in &t.pairs {
            let j = ((a2 * g as u128 + b2 * gi as u128 + shift) % cm) as usize;
            re += t.cos[j];
            im += t.sin[j];
        }
    }
    ExpSumValue::project(re, im).value
}

/// Closed form of [`kloosterman_square_average`]: `phi(c) sqrt(c)` when `c`
/// is a square, zero otherwise. Independent of `b`.
pub fn kloosterman_square_average_closed(c: u64) -> f64 {
    let r = (c as f64).sqrt().round() as u64;
    if r * r == c {
        (euler_phi(c) * r) as f64
    } else {
        0.0
    }
}

/// Right-hand side of Weil's bound, `d(c) sqrt(c) sqrt((n, m, c))`, with
/// the convention `gcd(0, 0, c) = c`.
pub fn weil_bound(n: i64, m: i64, c: u64) -> f64 {
    let g = n.unsigned_abs().gcd(&m.unsigned_abs()).gcd(&c);
    num_divisors(c) as f64 * (c as f64).sqrt() * (g as f64).sqrt()
}

pub fn weil_check(n: i64, m: i64, c: u64) -> bool {
    kloosterman(n, m, c).value.abs() <= weil_bound(n, m, c) * (1.0 + 1e-12) + 1e-9
}
