//! Exact arithmetic for identity checks: numbers of the form `a + b sqrt(p)`
//! with rational `a`, `b`, and symbolic sums of `1/sqrt(d)` over squarefree `d`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{divisors, divisors_from_factors, factorize, is_squarefree, num_divisors, squarefree_decompose};

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `a + b sqrt(p)` in the quadratic field `Q(sqrt p)`, `p` squarefree > 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub p: u64,
    pub a: BigRational,
    pub b: BigRational,
}

impl Surd {
    pub fn new(p: u64, a: BigRational, b: BigRational) -> Self {
        assert!(p > 1 && is_squarefree(p), "radicand must be squarefree");
        Surd { p, a, b }
    }

    pub fn rational(p: u64, a: BigRational) -> Self {
        Surd::new(p, a, BigRational::zero())
    }

    pub fn sqrt_p(p: u64) -> Self {
        Surd::new(p, BigRational::zero(), BigRational::one())
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        Surd { p: self.p, a: self.a.clone(), b: -self.b.clone() }
    }

    /// `a^2 - p b^2`.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(self.p.into()) * &self.b * &self.b
    }

    pub fn recip(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "division by zero in Q(sqrt {})", self.p);
        let c = self.conj();
        Surd { p: self.p, a: c.a / &n, b: c.b / n }
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap() + self.b.to_f64().unwrap() * (self.p as f64).sqrt()
    }

    pub fn is_positive(&self) -> bool {
        // sign of a + b sqrt p without floating point
        let (sa, sb) = (self.a.signum(), self.b.signum());
        if !sa.is_negative() && !sb.is_negative() {
            return !(self.a.is_zero() && self.b.is_zero());
        }
        if sa.is_negative() && sb.is_negative() {
            return false;
        }
        let a2 = &self.a * &self.a;
        let pb2 = BigRational::from_integer(self.p.into()) * &self.b * &self.b;
        if sa.is_positive() { a2 > pb2 } else { pb2 > a2 }
    }

    fn check(&self, other: &Surd) {
        assert_eq!(self.p, other.p, "mixing different quadratic fields");
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, o: &Surd) -> Surd {
        self.check(o);
        Surd { p: self.p, a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, o: &Surd) -> Surd {
        self.check(o);
        Surd { p: self.p, a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, o: &Surd) -> Surd {
        self.check(o);
        let p = BigRational::from_integer(self.p.into());
        Surd {
            p: self.p,
            a: &self.a * &o.a + p * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl Div for &Surd {
    type Output = Surd;
    fn div(self, o: &Surd) -> Surd {
        self * &o.recip()
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { p: self.p, a: -self.a.clone(), b: -self.b.clone() }
    }
}

impl Mul<&BigRational> for &Surd {
    type Output = Surd;
    fn mul(self, r: &BigRational) -> Surd {
        Surd { p: self.p, a: &self.a * r, b: &self.b * r }
    }
}

/// `mu_*(p) = -1 - p^{-1/2}` exactly.
pub fn mu_star_prime(p: u64) -> Surd {
    Surd::new(p, rational(-1, 1), rational(-1, p as i64))
}

/// `tau(p) = 2 + p^{-1/2}` exactly.
pub fn tau_star_prime(p: u64) -> Surd {
    Surd::new(p, rational(2, 1), rational(1, p as i64))
}

/// Symbolic value of a sum `sum_d c_d / sqrt(d)` over squarefree `d`,
/// stored as `d -> c_d`.
pub type InverseRootSum = BTreeMap<u64, u64>;

/// `tau(n)` via the sum over `d | n^2`, as an exact [`InverseRootSum`].
pub fn tau_star_symbolic_square(n: u64) -> InverseRootSum {
    let squared: Vec<(u64, u32)> = factorize(n).iter().map(|&(p, e)| (p, 2 * e)).collect();
    let mut out = InverseRootSum::new();
    for d in divisors_from_factors(&squared) {
        *out.entry(squarefree_decompose(d).expect("d >= 1").d1).or_insert(0) += 1;
    }
    out
}

/// `tau(n)` via `sum_{f | n} mu^2(f) d(n/f) / sqrt f`, as an exact [`InverseRootSum`].
pub fn tau_star_symbolic_convolution(n: u64) -> InverseRootSum {
    let mut out = InverseRootSum::new();
    for f in divisors(n) {
        if is_squarefree(f) {
            *out.entry(f).or_insert(0) += num_divisors(n / f);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        let x = Surd::new(5, rational(1, 2), rational(3, 1));
        let y = Surd::new(5, rational(-2, 3), rational(1, 7));
        let q = &(&x * &y) / &y;
        assert_eq!(q, x);
        let s = &Surd::sqrt_p(5) * &Surd::sqrt_p(5);
        assert_eq!(s, Surd::rational(5, rational(5, 1)));
        assert!((x.to_f64() - (0.5 + 3.0 * 5f64.sqrt())).abs() < 1e-14);
        assert!(x.is_positive());
        assert!(!Surd::new(2, rational(-3, 2), rational(1, 1)).is_positive());
        assert!(Surd::new(2, rational(-1, 1), rational(1, 1)).is_positive());
    }

    #[test]
    fn symbolic_tau_forms_agree() {
        for n in 1..=2000 {
            assert_eq!(tau_star_symbolic_square(n), tau_star_symbolic_convolution(n), "n = {n}");
        }
        let t6 = tau_star_symbolic_square(6);
        assert_eq!(t6, [(1, 4), (2, 2), (3, 2), (6, 1)].into_iter().collect());
    }
}
