//! The exact-identity suite: exponential sums, multiplicative functions,
//! the mollifier algebra and the special-function functional equations.
//!
//! Each family returns an [`IdentityOutcome`]; [`run_all`] collects them in
//! a fixed order.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::arith::exact::{mu_star_prime, rational, tau_star_symbolic_convolution, tau_star_symbolic_square, Surd};
use crate::arith::{
    euler_phi, gen_von_mangoldt, is_squarefree, kloosterman_square_average, kloosterman_square_average_closed,
    mobius, mu_star, primes_up_to, ramanujan_sum_direct, tau_star_both, weil_bound, ArithTable, KloostermanTable,
};
use crate::lfun::CompletedFactors;
use crate::mollifier::{
    contributions_exact, m2_closed_form_exact, quad_form_brute, quad_form_diag, v_coeff, x_from_y, y_from_x,
    Coefficients,
};
use crate::specfun::{g_reflection_sides, ln_gamma, zeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteSize {
    /// Reduced ranges, a few seconds in a debug build.
    Quick,
    /// The full published ranges.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityOutcome {
    pub family: &'static str,
    pub checks: usize,
    pub failures: usize,
    /// Largest error seen, in the family's own metric.
    pub max_error: f64,
    pub tolerance: f64,
    /// First failing case, if any.
    pub first_failure: Option<String>,
}

impl IdentityOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }
}

struct Tally {
    out: IdentityOutcome,
}

impl Tally {
    fn new(family: &'static str, tolerance: f64) -> Self {
        Tally {
            out: IdentityOutcome { family, checks: 0, failures: 0, max_error: 0.0, tolerance, first_failure: None },
        }
    }

    /// Record an error against the family tolerance.
    fn error(&mut self, err: f64, case: impl FnOnce() -> String) {
        self.check(err <= self.out.tolerance, err, case);
    }

    fn check(&mut self, ok: bool, err: f64, case: impl FnOnce() -> String) {
        self.out.checks += 1;
        if err.is_nan() || err > self.out.max_error {
            self.out.max_error = err;
        }
        if !ok {
            self.out.failures += 1;
            if self.out.first_failure.is_none() {
                self.out.first_failure = Some(case());
            }
        }
    }

    fn done(self) -> IdentityOutcome {
        self.out
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// `sum_a S(a^2, b^2; c) e(2ab/c)` against `phi(c) sqrt c` on squares and
/// zero elsewhere.
pub fn kloosterman_square(size: SuiteSize) -> IdentityOutcome {
    let (b_max, c_max) = match size {
        SuiteSize::Quick => (6, 40),
        SuiteSize::Full => (50, 200),
    };
    let mut t = Tally::new("kloosterman_square_average", 1e-6);
    for c in 1..=c_max {
        let closed = kloosterman_square_average_closed(c);
        let scale = (euler_phi(c) as f64 * (c as f64).sqrt()).max(1.0);
        for b in 1..=b_max {
            let direct = kloosterman_square_average(b, c);
            t.error((direct - closed).abs() / scale, || format!("b={b} c={c}: {direct} vs {closed}"));
        }
    }
    t.done()
}

/// `r_c(n) = mu(c/(c,n)) phi(c) / phi(c/(c,n))` against the direct sum.
pub fn ramanujan(size: SuiteSize) -> IdentityOutcome {
    let c_max = if size == SuiteSize::Full { 300 } else { 60 };
    let mut t = Tally::new("ramanujan_closed_form", 1e-9);
    for c in 1..=c_max {
        for n in 0..=40i64 {
            let g = num_integer::gcd(n.unsigned_abs(), c);
            let q = c / g;
            let closed = mobius(q) as f64 * euler_phi(c) as f64 / euler_phi(q) as f64;
            let direct = ramanujan_sum_direct(c, n);
            t.error(rel(direct, closed), || format!("c={c} n={n}: {direct} vs {closed}"));
        }
    }
    t.done()
}

/// `|S(n, m; c)| <= d(c) sqrt((n, m, c)) sqrt c`.
pub fn weil(size: SuiteSize) -> IdentityOutcome {
    let (nm, c_max) = match size {
        SuiteSize::Quick => (10, 120),
        SuiteSize::Full => (30, 500),
    };
    let mut t = Tally::new("weil_bound", 0.0);
    for c in 1..=c_max {
        let table = KloostermanTable::new(c);
        for n in 1..=nm {
            for m in 1..=nm {
                let s = table.sum(n, m).value.abs();
                let bound = weil_bound(n, m, c);
                let excess = (s - bound * (1.0 + 1e-12) - 1e-9).max(0.0);
                t.error(excess, || format!("n={n} m={m} c={c}: |S| = {s} > {bound}"));
            }
        }
    }
    t.done()
}

/// `mu_*(p)^2 / (p^2 v_p) = 1/(p-1)`: exactly in `Q(sqrt p)` for small
/// primes, in floating point beyond.
pub fn mu_star_factor(size: SuiteSize) -> IdentityOutcome {
    let float_limit = if size == SuiteSize::Full { 10_000 } else { 1_000 };
    let mut t = Tally::new("mu_star_over_v", 1e-12);
    for p in primes_up_to(100) {
        let pi = p as i64;
        let mu = mu_star_prime(p);
        // p^2 v_p = p (1 - 1/p^2) + 2 (1 - 1/p) sqrt p
        let pv = Surd::new(p, rational(pi * pi - 1, pi), rational(2 * (pi - 1), pi));
        let lhs = &(&mu * &mu) / &pv;
        let ok = lhs == Surd::rational(p, rational(1, pi - 1));
        t.check(ok, if ok { 0.0 } else { 1.0 }, || format!("p={p}: exact value {lhs:?}"));
    }
    for p in primes_up_to(float_limit) {
        let q = p as f64;
        let lhs = mu_star(p).powi(2) / (q * q * v_coeff(p).expect("prime is squarefree"));
        t.error((lhs * (q - 1.0) - 1.0).abs(), || format!("p={p}: {lhs}"));
    }
    t.done()
}

/// The two expressions for `tau(n)`, symbolically for `n <= 2000` and in
/// floating point up to `10^4`.
pub fn tau_dual(size: SuiteSize) -> IdentityOutcome {
    let limit = if size == SuiteSize::Full { 10_000 } else { 1_000 };
    let mut t = Tally::new("tau_dual_formula", 1e-12);
    for n in 1..=limit {
        if n <= 2000 {
            let ok = tau_star_symbolic_square(n) == tau_star_symbolic_convolution(n);
            t.check(ok, if ok { 0.0 } else { 1.0 }, || format!("n={n}: symbolic forms differ"));
        }
        let (a, b) = tau_star_both(n);
        t.error(rel(a, b), || format!("n={n}: {a} vs {b}"));
    }
    t.done()
}

/// `|sum_{j <= x} mu^2(j)/phi(j) - log x| <= 2` for `100 <= x <= X`.
pub fn mu2_over_phi(size: SuiteSize) -> IdentityOutcome {
    let limit = if size == SuiteSize::Full { 1_000_000 } else { 20_000 };
    let table = ArithTable::new(limit);
    let mut t = Tally::new("mu2_over_phi_vs_log", 2.0);
    let mut acc = crate::sum::CompensatedSum::new();
    for j in 1..=limit {
        if table.mobius(j) != 0 {
            acc.add(1.0 / table.phi(j) as f64);
        }
        if j >= 100 {
            let gap = (acc.value() - (j as f64).ln()).abs();
            t.error(gap, || format!("x={j}: gap {gap}"));
        }
    }
    t.done()
}

/// `Lambda_j` support and the Leibniz rule on coprime pairs.
pub fn von_mangoldt(size: SuiteSize) -> IdentityOutcome {
    let limit = if size == SuiteSize::Full { 500 } else { 60 };
    let mut t = Tally::new("generalized_von_mangoldt", 1e-9);
    let table = ArithTable::new(limit * limit);
    let binom = |j: u32, i: u32| -> f64 { (0..i).fold(1.0, |acc, r| acc * (j - r) as f64 / (r + 1) as f64) };
    for j in 1..=4u32 {
        for n in 2..=limit * 4 {
            let omega = table.factorize(n).len() as u32;
            if omega > j {
                let v = gen_von_mangoldt(j, n).expect("order <= 4");
                t.error(v.abs(), || format!("Lambda_{j}({n}) = {v} with {omega} prime factors"));
            }
        }
        for n in (2..=limit).step_by(7) {
            for m in (2..=limit).step_by(11) {
                if num_integer::gcd(n, m) != 1 {
                    continue;
                }
                let lhs = gen_von_mangoldt(j, n * m).expect("order <= 4");
                let rhs: f64 = (0..=j)
                    .map(|i| {
                        let a = if i == 0 { if n == 1 { 1.0 } else { 0.0 } } else { gen_von_mangoldt(i, n).unwrap() };
                        let b = if j == i { if m == 1 { 1.0 } else { 0.0 } } else { gen_von_mangoldt(j - i, m).unwrap() };
                        binom(j, i) * a * b
                    })
                    .sum();
                t.error(rel(lhs, rhs), || format!("j={j} n={n} m={m}: {lhs} vs {rhs}"));
            }
        }
    }
    t.done()
}

fn random_x(rng: &mut ChaCha8Rng, m: u64) -> Coefficients {
    let density = rng.gen_range(0.2..1.0);
    let mut x = Coefficients::new();
    x.insert(1, rng.gen_range(-2.0..2.0));
    for r in 2..=m {
        if is_squarefree(r) && rng.gen::<f64>() < density {
            x.insert(r, rng.gen_range(-2.0..2.0));
        }
    }
    x
}

/// Brute-force quadratic form against its diagonalization, and the `x <-> y`
/// round trip.
pub fn diagonalization(size: SuiteSize) -> IdentityOutcome {
    let (trials, round_trip_m) = match size {
        SuiteSize::Quick => (20, 60),
        SuiteSize::Full => (100, 200),
    };
    let mut t = Tally::new("mollifier_diagonalization", 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..trials {
        let m = rng.gen_range(5..=50);
        let x = random_x(&mut rng, m);
        let brute = quad_form_brute(&x, m).expect("m within brute-force range");
        let diag = quad_form_diag(&y_from_x(&x, m).expect("valid x")).expect("valid y");
        t.error((brute - diag).abs() / brute.abs().max(1e-300), || format!("trial {i}, M={m}: {brute} vs {diag}"));
    }
    for m in [10, 50, 120, round_trip_m] {
        let x = random_x(&mut rng, m);
        let back = x_from_y(&y_from_x(&x, m).expect("valid x"), m).expect("valid y");
        let err = back
            .iter()
            .map(|(r, v)| (v - x.get(r).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max);
        t.check(err <= 1e-12, err, || format!("round trip M={m}: {err}"));
    }
    t.done()
}

/// The four second-moment contributions sum to `a(1+a)^3(3+3a+a^2)/18`,
/// `1 - (3/2)^{-3} = 19/27`, and `M1^2/M2` equals `(1 - (1+a)^{-3})
/// hat h(0) K / 2` on the leading coefficients, all in exact rationals.
pub fn proportion_algebra() -> IdentityOutcome {
    let mut t = Tally::new("proportion_algebra", 0.0);
    let n = |v: i64| BigRational::from_integer(BigInt::from(v));
    let exact = |ok: bool, t: &mut Tally, case: String| t.check(ok, if ok { 0.0 } else { 1.0 }, || case);
    for i in 1..=20i64 {
        let a = BigRational::new(BigInt::from(i), BigInt::from(42));
        let parts = contributions_exact(&a);
        let sum = parts.iter().fold(BigRational::zero(), |s, p| s + p);
        let m2 = m2_closed_form_exact(&a);
        exact(sum == m2, &mut t, format!("a={a}: contributions sum to {sum}, closed form {m2}"));
        // leading coefficients: M1 ~ a(3+3a+a^2)/6, M2 ~ closed form; ratio against (1 - (1+a)^{-3})/2
        let m1 = &a * (n(3) + n(3) * &a + &a * &a) / n(6);
        let one_a = n(1) + &a;
        let cube = &one_a * &one_a * &one_a;
        let prop = n(1) - BigRational::one() / &cube;
        exact(&m1 * &m1 / &m2 == prop / n(2), &mut t, format!("a={a}: M1^2/M2 mismatch"));
    }
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let one_half = n(1) + &half;
    let p = n(1) - BigRational::one() / (&one_half * &one_half * &one_half);
    exact(p == BigRational::new(19.into(), 27.into()), &mut t, format!("proportion(1/2) = {p}"));
    t.done()
}

fn strip_points(count: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Complex64::new(rng.gen_range(0.05..0.95), rng.gen_range(-5.0..5.0)))
        .collect()
}

/// `(8 pi)^s zeta(2s) Gamma(s) G(s) sin(pi s/2 - pi/4) = -zeta(1-2s) G(-s)/sqrt 2`
/// on the strip `0 < Re s < 1`.
pub fn g_reflection() -> IdentityOutcome {
    let mut t = Tally::new("g_reflection", 1e-10);
    for s in strip_points(10, 0xfeed) {
        match g_reflection_sides(s) {
            Ok((l, r)) => t.error(crel(l, r), || format!("s={s}: {l} vs {r}")),
            Err(e) => t.check(false, f64::NAN, || format!("s={s}: {e}")),
        }
    }
    t.done()
}

/// Gamma duplication and reflection, the zeta functional equation and the
/// collapsed archimedean factor, on fixed grids.
pub fn functional_equations() -> IdentityOutcome {
    let mut t = Tally::new("specfun_functional_equations", 1e-9);
    let lg = |z: Complex64| ln_gamma(z).expect("off the poles");
    for i in 0..12 {
        let z = Complex64::new(0.13 + 0.41 * i as f64, -6.0 + 1.07 * i as f64);
        let a = lg(2.0 * z).exp();
        let b = ((2.0 * z - 1.0) * 2f64.ln() - 0.5 * PI.ln() + lg(z) + lg(z + 0.5)).exp();
        t.error(crel(b, a), || format!("duplication z={z}"));
        let w = Complex64::new(0.1 + 0.07 * i as f64, -3.0 + 0.5 * i as f64);
        let refl = (lg(w) + lg(1.0 - w)).exp() * (w * PI).sin();
        t.error(crel(refl, Complex64::new(PI, 0.0)), || format!("reflection z={w}"));
    }
    for s in strip_points(12, 0xbead).into_iter().chain([Complex64::new(-1.5, 2.0), Complex64::new(2.5, -7.0)]) {
        let lhs = zeta(s).expect("s != 1");
        let rhs = (s * 2f64.ln() + (s - 1.0) * PI.ln() + lg(1.0 - s)).exp() * (s * PI / 2.0).sin() * zeta(1.0 - s).expect("s != 0");
        t.error(crel(rhs, lhs), || format!("zeta functional equation s={s}: {lhs} vs {rhs}"));
    }
    for k in [12u32, 40, 160] {
        let c = CompletedFactors::new(k);
        for i in 0..6 {
            let s = Complex64::new(-0.4 + 0.3 * i as f64, -7.0 + 2.1 * i as f64);
            let a = c.ln_l_inf(s).expect("off the poles").exp();
            let b = c.ln_l_inf_collapsed(s).expect("off the poles").exp();
            t.error(crel(b, a), || format!("collapsed archimedean factor k={k} s={s}"));
        }
    }
    t.done()
}

pub fn exponential_sums(size: SuiteSize) -> Vec<IdentityOutcome> {
    vec![kloosterman_square(size), ramanujan(size), weil(size)]
}

pub fn arithmetic(size: SuiteSize) -> Vec<IdentityOutcome> {
    vec![mu_star_factor(size), tau_dual(size), mu2_over_phi(size), von_mangoldt(size)]
}

pub fn run_all(size: SuiteSize) -> Vec<IdentityOutcome> {
    let mut out = exponential_sums(size);
    out.extend(arithmetic(size));
    out.push(diagonalization(size));
    out.push(proportion_algebra());
    out.push(g_reflection());
    out.push(functional_equations());
    out
}
