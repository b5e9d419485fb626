use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::ops::{Add, Mul, Sub};

use crate::{Error, Result};

/// Truncated power series `sum_{n < N} c(n) q^n` with exact integer
/// coefficients; `N` is the precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    pub weight: u32,
    coeffs: Vec<BigInt>,
}

impl QExpansion {
    pub fn new(weight: u32, coeffs: Vec<BigInt>) -> Self {
        QExpansion { weight, coeffs }
    }

    pub fn one(precision: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); precision];
        if precision > 0 {
            coeffs[0] = BigInt::one();
        }
        QExpansion { weight: 0, coeffs }
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `q^n`; panics beyond the precision.
    pub fn coeff(&self, n: usize) -> &BigInt {
        &self.coeffs[n]
    }

    pub fn truncate(&self, precision: usize) -> Self {
        let n = precision.min(self.precision());
        QExpansion { weight: self.weight, coeffs: self.coeffs[..n].to_vec() }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        QExpansion { weight: self.weight, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = QExpansion::one(self.precision());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }
}

impl Add for &QExpansion {
    type Output = QExpansion;
    fn add(self, o: &QExpansion) -> QExpansion {
        let n = self.precision().min(o.precision());
        let coeffs = (0..n).map(|i| &self.coeffs[i] + &o.coeffs[i]).collect();
        QExpansion { weight: self.weight, coeffs }
    }
}

impl Sub for &QExpansion {
    type Output = QExpansion;
    fn sub(self, o: &QExpansion) -> QExpansion {
        let n = self.precision().min(o.precision());
        let coeffs = (0..n).map(|i| &self.coeffs[i] - &o.coeffs[i]).collect();
        QExpansion { weight: self.weight, coeffs }
    }
}

impl Mul for &QExpansion {
    type Output = QExpansion;
    fn mul(self, o: &QExpansion) -> QExpansion {
        let n = self.precision().min(o.precision());
        let mut coeffs = vec![BigInt::zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().take(n - i).enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        QExpansion { weight: self.weight + o.weight, coeffs }
    }
}

/// `sigma_r(n)` for `n < len`, by a divisor sieve.
pub(crate) fn divisor_power_sums(len: usize, r: u32) -> Vec<u128> {
    let mut s = vec![0u128; len];
    for d in 1..len {
        let dr = (d as u128).pow(r);
        let mut m = d;
        while m < len {
            s[m] += dr;
            m += d;
        }
    }
    s
}

/// `E_4 = 1 + 240 sum sigma_3(n) q^n` or `E_6 = 1 - 504 sum sigma_5(n) q^n`.
pub fn eisenstein(weight: u32, precision: usize) -> Result<QExpansion> {
    let (r, c) = match weight {
        4 => (3, 240),
        6 => (5, -504),
        _ => return Err(Error::invalid(format!("eisenstein weight must be 4 or 6, got {weight}"))),
    };
    if precision < 1 {
        return Err(Error::invalid("precision must be at least 1"));
    }
    let sig = divisor_power_sums(precision, r);
    let mut coeffs: Vec<BigInt> = sig.iter().map(|&s| BigInt::from(s) * c).collect();
    coeffs[0] = BigInt::one();
    Ok(QExpansion { weight, coeffs })
}

/// `Delta = (E_4^3 - E_6^2) / 1728`.
pub fn delta(precision: usize) -> Result<QExpansion> {
    let e4 = eisenstein(4, precision)?;
    let e6 = eisenstein(6, precision)?;
    let diff = &e4.pow(3) - &e6.pow(2);
    let k = BigInt::from(1728);
    let coeffs = diff.coeffs.iter().map(|x| x / &k).collect();
    Ok(QExpansion { weight: 12, coeffs })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Ramanujan tau from the product q prod (1 - q^n)^24, computed with
    /// plain i128 arithmetic.
    fn tau_eta_oracle(n: usize) -> Vec<i128> {
        let mut p = vec![0i128; n + 1];
        p[0] = 1;
        for m in 1..=n {
            for _ in 0..24 {
                for i in (m..=n).rev() {
                    p[i] -= p[i - m];
                }
            }
        }
        let mut out = vec![0i128; n + 1];
        out[1..=n].copy_from_slice(&p[..n]);
        out
    }

    #[test]
    fn eisenstein_examples() {
        let e4 = eisenstein(4, 10).unwrap();
        let e6 = eisenstein(6, 10).unwrap();
        assert_eq!(e4.coeff(1), &BigInt::from(240));
        assert_eq!(e6.coeff(2), &BigInt::from(-504 * 33));
        let d = &e4.pow(3) - &e6.pow(2);
        assert!(d.coeff(0).is_zero());
        assert!(eisenstein(8, 10).is_err());
    }

    #[test]
    fn delta_matches_eta_product() {
        let d = delta(31).unwrap();
        let oracle = tau_eta_oracle(30);
        for n in 0..=30 {
            assert_eq!(d.coeff(n), &BigInt::from(oracle[n]), "n = {n}");
        }
        assert_eq!(d.coeff(2), &BigInt::from(-24));
        assert_eq!(d.coeff(3), &BigInt::from(252));
        assert_eq!(d.coeff(6), &(d.coeff(2) * d.coeff(3)));
    }

    #[test]
    fn precision_min_rule() {
        let a = eisenstein(4, 8).unwrap();
        let b = eisenstein(6, 5).unwrap();
        assert_eq!((&a * &b).precision(), 5);
        assert_eq!((&a + &b).precision(), 5);
        assert_eq!((&a * &b).weight, 10);
    }
}
