//! Victor Miller bases computed modulo a set of word-size primes and lifted
//! back to exact integers by the Chinese remainder theorem.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::qexp::{divisor_power_sums, QExpansion};
use super::dimension;
use crate::{Error, Result};

/// Primes just below 2^31 so that products fit in `u64` and long dot
/// products fit in `u128` without intermediate reduction.
fn primes_below_2_31(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n: u64 = (1 << 31) - 1;
    while out.len() < count {
        if crate::arith::is_prime(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

type Series = Vec<u64>;

fn mul(a: &Series, b: &Series, p: u64) -> Series {
    let n = a.len().min(b.len());
    let va = a.iter().position(|&x| x != 0).unwrap_or(n);
    let vb = b.iter().position(|&x| x != 0).unwrap_or(n);
    let mut out = vec![0u64; n];
    for m in (va + vb)..n {
        let mut acc: u128 = 0;
        for i in va..=(m - vb) {
            acc += (a[i] * b[m - i]) as u128;
        }
        out[m] = (acc % p as u128) as u64;
    }
    out
}

fn inverse(a: &Series, p: u64) -> Series {
    debug_assert_eq!(a[0], 1);
    let n = a.len();
    let mut b = vec![0u64; n];
    b[0] = 1;
    for m in 1..n {
        let mut acc: u128 = 0;
        for i in 1..=m {
            acc += (a[i] * b[m - i]) as u128;
        }
        let s = (acc % p as u128) as u64;
        b[m] = (p - s) % p;
    }
    b
}

/// Shared ingredients modulo one prime.
struct Ring {
    p: u64,
    e4: Series,
    e6: Series,
    /// `Delta / E_6^2`
    ratio: Series,
    /// `E_6^{2j}`, grown on demand
    e6_sq_pows: Vec<Series>,
}

impl Ring {
    fn new(p: u64, precision: usize, sig3: &[u128], sig5: &[u128]) -> Self {
        let pm = p as u128;
        let mut e4: Series = sig3.iter().map(|&s| (240 * (s % pm) % pm) as u64).collect();
        let mut e6: Series = sig5.iter().map(|&s| ((pm - 504 * (s % pm) % pm) % pm) as u64).collect();
        e4[0] = 1;
        e6[0] = 1;
        let e6sq = mul(&e6, &e6, p);
        let e4cube = mul(&mul(&e4, &e4, p), &e4, p);
        let inv1728 = inv_mod(1728, p);
        let delta: Series = (0..precision)
            .map(|i| (e4cube[i] + p - e6sq[i]) % p * inv1728 % p)
            .collect();
        let ratio = mul(&delta, &inverse(&e6sq, p), p);
        let mut one = vec![0u64; precision];
        one[0] = 1;
        Ring { p, e4, e6, ratio, e6_sq_pows: vec![one, e6sq] }
    }

    fn e6_sq_pow(&mut self, j: usize) -> &Series {
        while self.e6_sq_pows.len() <= j {
            let next = mul(self.e6_sq_pows.last().unwrap(), &self.e6_sq_pows[1], self.p);
            self.e6_sq_pows.push(next);
        }
        &self.e6_sq_pows[j]
    }

    fn remainder_form(&self, r: u32) -> Series {
        let p = self.p;
        let n = self.e4.len();
        let mut one = vec![0u64; n];
        one[0] = 1;
        match r {
            0 => one,
            4 => self.e4.clone(),
            6 => self.e6.clone(),
            8 => mul(&self.e4, &self.e4, p),
            10 => mul(&self.e4, &self.e6, p),
            14 => mul(&mul(&self.e4, &self.e4, p), &self.e6, p),
            _ => unreachable!("weight remainder {r}"),
        }
    }

    /// Echelonized basis `g_1..g_d` modulo `p`.
    fn basis(&mut self, k: u32, d: usize) -> Vec<Series> {
        let p = self.p;
        let r = k - 12 * d as u32;
        let f = self.remainder_form(r);
        let mut g = mul(&f, &self.e6_sq_pow(d).clone(), p);
        let mut gs = Vec::with_capacity(d);
        for _ in 0..d {
            g = mul(&g, &self.ratio, p);
            gs.push(g.clone());
        }
        for i in (0..d).rev() {
            for j in (i + 1)..d {
                let c = gs[i][j + 1];
                if c == 0 {
                    continue;
                }
                let (lo, hi) = gs.split_at_mut(j);
                for (x, y) in lo[i].iter_mut().zip(hi[0].iter()) {
                    *x = (*x + p - c * y % p) % p;
                }
            }
        }
        gs
    }
}

/// Builds Victor Miller bases for many weights at one precision,
/// sharing the Eisenstein data and the powers of `E_6^2`.
pub struct BasisFactory {
    precision: usize,
    rings: Vec<Ring>,
    sig3: Vec<u128>,
    sig5: Vec<u128>,
}

impl BasisFactory {
    pub fn new(precision: usize) -> Self {
        BasisFactory {
            precision,
            rings: Vec::new(),
            sig3: divisor_power_sums(precision, 3),
            sig5: divisor_power_sums(precision, 5),
        }
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    fn ensure_primes(&mut self, count: usize) {
        if self.rings.len() >= count {
            return;
        }
        for p in primes_below_2_31(count).into_iter().skip(self.rings.len()) {
            self.rings.push(Ring::new(p, self.precision, &self.sig3, &self.sig5));
        }
    }

    pub fn basis(&mut self, k: u32) -> Result<Vec<QExpansion>> {
        let all: Vec<usize> = (0..self.precision).collect();
        let coeffs = self.basis_at(k, &all)?;
        Ok(coeffs.into_iter().map(|c| QExpansion::new(k, c)).collect())
    }

    /// Exact basis coefficients `g_j(n)` for the listed `n` only.
    pub fn basis_at(&mut self, k: u32, indices: &[usize]) -> Result<Vec<Vec<BigInt>>> {
        let d = dimension(k);
        if d == 0 {
            return Err(Error::invalid(format!("no cusp forms of weight {k}")));
        }
        if let Some(&n) = indices.iter().find(|&&n| n >= self.precision) {
            return Err(Error::InsufficientPrecision { required: n + 1, available: self.precision });
        }
        // the normalized coefficients g_j(n) (j/n)^{(k-1)/2} are O(1); allow
        // generous headroom and verify with two spare primes
        let bits = (k as f64 - 1.0) / 2.0 * (self.precision as f64).log2() + 64.0;
        let mut count = (bits / 30.0).ceil() as usize + 2;
        loop {
            self.ensure_primes(count);
            let residues: Vec<Vec<Series>> =
                self.rings[..count].iter_mut().map(|r| r.basis(k, d)).collect();
            let moduli: Vec<u64> = self.rings[..count].iter().map(|r| r.p).collect();
            match lift(&residues, &moduli, d, indices) {
                Some(coeffs) => return Ok(coeffs),
                None => count *= 2,
            }
        }
    }
}

/// Garner reconstruction into the symmetric range using all but the last two
/// moduli, then a consistency check against those two.
fn lift(residues: &[Vec<Series>], moduli: &[u64], d: usize, indices: &[usize]) -> Option<Vec<Vec<BigInt>>> {
    let used = moduli.len() - 2;
    let inv: Vec<Vec<u64>> = (0..used)
        .map(|i| (0..i).map(|j| inv_mod(moduli[j] % moduli[i], moduli[i])).collect())
        .collect();
    let mut modulus = BigInt::from(1u8);
    for &p in &moduli[..used] {
        modulus *= p;
    }
    let half = &modulus >> 1;
    let mut out = Vec::with_capacity(d);
    let mut digits = vec![0u64; used];
    for j in 0..d {
        let mut row = Vec::with_capacity(indices.len());
        for &m in indices {
            for i in 0..used {
                let p = moduli[i];
                let mut t = residues[i][j][m];
                for jj in 0..i {
                    t = (t + p - digits[jj] % p) % p * inv[i][jj] % p;
                }
                digits[i] = t;
            }
            let mut x = BigInt::zero();
            for i in (0..used).rev() {
                x = x * moduli[i] + digits[i];
            }
            if x > half {
                x -= &modulus;
            }
            for s in used..moduli.len() {
                let p = moduli[s] as i64;
                let r = (&x % p).to_i64().unwrap().rem_euclid(p) as u64;
                if r != residues[s][j][m] {
                    return None;
                }
            }
            row.push(x);
        }
        out.push(row);
    }
    Some(out)
}
