//! The optimal mollifier: coefficients `u_j`, `v_j`, the change of variables
//! `x <-> y`, the diagonal quadratic form and the closed-form predictions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::arith::{divisors, factorize, is_squarefree, mobius, mu_star, tau_star};
use crate::hecke::HeckeEigenform;
use crate::lfun::afe_constant;
use crate::specfun::BumpWeight;
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Largest `M` accepted by [`quad_form_brute`].
pub const BRUTE_FORCE_LIMIT: u64 = 100;

/// Coefficients over squarefree integers, keyed by the integer.
pub type Coefficients = BTreeMap<u64, f64>;

/// A mollifier `M(f) = sum_{r <= M} x_r a_f(r^2) / sqrt r` together with its
/// diagonal coordinates `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    #[serde(rename = "K")]
    pub k_scale: f64,
    pub a: f64,
    #[serde(rename = "M")]
    pub length: u64,
    pub y: Coefficients,
    pub x: Coefficients,
    pub h: String,
}

/// Leading-order predictions for the mollified moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub m1_leading: f64,
    pub m2_contributions: [f64; 4],
    pub m2_leading: f64,
    pub proportion: f64,
}

fn require_squarefree(j: u64) -> Result<()> {
    if j == 0 || !is_squarefree(j) {
        return Err(Error::invalid(format!("{j} is not a positive squarefree integer")));
    }
    Ok(())
}

/// `M = floor(K^a)`, robust to `K^a` landing a rounding error below an integer.
pub fn mollifier_length(k_scale: f64, a: f64) -> u64 {
    let m = k_scale.powf(a);
    let r = m.round();
    if (m - r).abs() <= 1e-9 * r.max(1.0) { r as u64 } else { m.floor() as u64 }
}

/// `v_j = j^{-1} prod_{p | j} (1 + 2p^{-1/2} - 2p^{-3/2} - p^{-2})`.
pub fn v_coeff(j: u64) -> Result<f64> {
    require_squarefree(j)?;
    let prod: f64 = factorize(j)
        .iter()
        .map(|&(p, _)| {
            let q = p as f64;
            1.0 + 2.0 / q.sqrt() - 2.0 / q.powf(1.5) - 1.0 / (q * q)
        })
        .product();
    Ok(prod / j as f64)
}

/// `v_j` from its defining sum
/// `j^{-2} sum_{ab = j} mu(b) tau(b)^2 sum_{e | a^2} sqrt(e) tau(a^2 / e)`.
pub fn v_coeff_direct(j: u64) -> Result<f64> {
    require_squarefree(j)?;
    let mut acc = CompensatedSum::new();
    for alpha in divisors(j) {
        let beta = j / alpha;
        let tb = tau_star(beta);
        let inner: f64 = divisors(alpha * alpha)
            .into_iter()
            .map(|e| (e as f64).sqrt() * tau_star(alpha * alpha / e))
            .sum();
        acc.add(mobius(beta) as f64 * tb * tb * inner);
    }
    Ok(acc.value() / (j as f64 * j as f64))
}

/// `int h(u) (log u) du / int h(u) du`.
fn log_mean(h: &BumpWeight) -> f64 {
    h.integrate(f64::ln) / h.integral()
}

/// `u_j = (1/hat h(0)) j^{-1} sum_{nr = j} mu(n) tau(n) int h(u) (log(uK/r) + C) du`.
pub fn u_coeff(j: u64, k_scale: f64, h: &BumpWeight) -> Result<f64> {
    require_squarefree(j)?;
    if !(k_scale > 1.0) {
        return Err(Error::invalid(format!("K must exceed 1, got {k_scale}")));
    }
    Ok(u_coeff_with(j, k_scale, afe_constant() + log_mean(h)))
}

fn u_coeff_with(j: u64, k_scale: f64, shift: f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for n in divisors(j) {
        let r = j / n;
        acc.add(mobius(n) as f64 * tau_star(n) * ((k_scale / r as f64).ln() + shift));
    }
    acc.value() / j as f64
}

/// `mu_*(j) log(Kj) / j`, the leading behaviour of `u_j`.
pub fn u_coeff_asymptotic(j: u64, k_scale: f64) -> Result<f64> {
    require_squarefree(j)?;
    Ok(mu_star(j) * (k_scale * j as f64).ln() / j as f64)
}

fn squarefree_upto(m: u64) -> impl Iterator<Item = u64> {
    (1..=m).filter(|&j| is_squarefree(j))
}

/// `y_j = sum_r tau(r) x_{jr} / r` on squarefree `j <= m`.
pub fn y_from_x(x: &Coefficients, m: u64) -> Result<Coefficients> {
    let mut y: BTreeMap<u64, CompensatedSum> = squarefree_upto(m).map(|j| (j, CompensatedSum::new())).collect();
    for (&s, &xs) in x {
        require_squarefree(s)?;
        if s > m {
            return Err(Error::invalid(format!("x supported at {s} beyond M = {m}")));
        }
        for j in divisors(s) {
            let r = s / j;
            y.get_mut(&j).expect("divisor of a squarefree number").add(tau_star(r) / r as f64 * xs);
        }
    }
    Ok(y.into_iter().map(|(j, v)| (j, v.value())).collect())
}

/// `x_r = sum_d y_{dr} tau(d) mu(d) / d` on squarefree `r <= m`.
pub fn x_from_y(y: &Coefficients, m: u64) -> Result<Coefficients> {
    let mut x: BTreeMap<u64, CompensatedSum> = squarefree_upto(m).map(|r| (r, CompensatedSum::new())).collect();
    for (&s, &ys) in y {
        require_squarefree(s)?;
        if s > m {
            return Err(Error::invalid(format!("y supported at {s} beyond M = {m}")));
        }
        for r in divisors(s) {
            let d = s / r;
            x.get_mut(&r).expect("divisor of a squarefree number").add(ys * tau_star(d) * mobius(d) as f64 / d as f64);
        }
    }
    Ok(x.into_iter().map(|(r, v)| (r, v.value())).collect())
}

/// The quadratic form before diagonalization:
/// `sum_a sum_{e | a^2} sum_{(r1, r2) = 1} sqrt(e) / (a^2 r1 r2) tau(r1 r2 a^2 / e) x_{a r1} x_{a r2}`.
pub fn quad_form_brute(x: &Coefficients, m: u64) -> Result<f64> {
    if m > BRUTE_FORCE_LIMIT {
        return Err(Error::invalid(format!("brute-force quadratic form limited to M <= {BRUTE_FORCE_LIMIT}")));
    }
    let get = |r: u64| x.get(&r).copied().unwrap_or(0.0);
    if let Some((&s, _)) = x.iter().find(|(&s, _)| s > m || !is_squarefree(s)) {
        return Err(Error::invalid(format!("x supported at {s}, outside squarefree r <= {m}")));
    }
    let mut acc = CompensatedSum::new();
    for alpha in 1..=m {
        let a2 = alpha * alpha;
        let es = divisors(a2);
        for r1 in 1..=m / alpha {
            let x1 = get(alpha * r1);
            if x1 == 0.0 {
                continue;
            }
            for r2 in 1..=m / alpha {
                let x2 = get(alpha * r2);
                if x2 == 0.0 || num_integer::gcd(r1, r2) != 1 {
                    continue;
                }
                for &e in &es {
                    let t = tau_star(r1 * r2 * a2 / e);
                    acc.add((e as f64).sqrt() / (a2 * r1 * r2) as f64 * t * x1 * x2);
                }
            }
        }
    }
    Ok(acc.value())
}

/// `sum_j v_j y_j^2`.
pub fn quad_form_diag(y: &Coefficients) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for (&j, &yj) in y {
        acc.add(v_coeff(j)? * yj * yj);
    }
    Ok(acc.value())
}

/// `sum_j u_j y_j`.
pub fn linear_form(y: &Coefficients, k_scale: f64, h: &BumpWeight) -> Result<f64> {
    let shift = afe_constant() + log_mean(h);
    let mut acc = CompensatedSum::new();
    for (&j, &yj) in y {
        require_squarefree(j)?;
        acc.add(u_coeff_with(j, k_scale, shift) * yj);
    }
    Ok(acc.value())
}

fn check_exponent(a: f64) -> Result<()> {
    if !(a > 0.0 && a < 0.5) {
        return Err(Error::invalid(format!("mollifier exponent a = {a} must lie in (0, 1/2)")));
    }
    Ok(())
}

/// The Cauchy-Schwarz optimum `y_j = u_j / v_j` on squarefree `j <= K^a`.
pub fn optimal_y(k_scale: f64, a: f64, h: &BumpWeight) -> Result<MollifierSpec> {
    check_exponent(a)?;
    if !(k_scale > 1.0) {
        return Err(Error::invalid(format!("K must exceed 1, got {k_scale}")));
    }
    let m = mollifier_length(k_scale, a);
    let shift = afe_constant() + log_mean(h);
    let mut y = Coefficients::new();
    for j in squarefree_upto(m) {
        y.insert(j, u_coeff_with(j, k_scale, shift) / v_coeff(j)?);
    }
    let x = x_from_y(&y, m)?;
    let spec = MollifierSpec { k_scale, a, length: m, y, x, h: h.identifier() };
    spec.validate()?;
    Ok(spec)
}

impl MollifierSpec {
    /// Support, finiteness and the transform pair `y = T x`.
    pub fn validate(&self) -> Result<()> {
        for (name, map) in [("x", &self.x), ("y", &self.y)] {
            for (&r, &v) in map {
                if r > self.length || !is_squarefree(r) || r == 0 {
                    return Err(Error::Contract(format!("{name} supported at {r}, outside squarefree r <= {}", self.length)));
                }
                if !v.is_finite() {
                    return Err(Error::Contract(format!("{name}_{r} is not finite")));
                }
            }
        }
        let back = y_from_x(&self.x, self.length)?;
        for (&j, &yj) in &self.y {
            let b = back.get(&j).copied().unwrap_or(0.0);
            if (b - yj).abs() > 1e-12 * yj.abs().max(1.0) {
                return Err(Error::Contract(format!("x and y tables disagree at j = {j}: {b} vs {yj}")));
            }
        }
        Ok(())
    }

    /// Mollifier with `x` supported at `r = 1` only.
    pub fn trivial(k_scale: f64, a: f64, h: &BumpWeight) -> Self {
        let mut x = Coefficients::new();
        x.insert(1, 1.0);
        let length = mollifier_length(k_scale, a).max(1);
        let y = y_from_x(&x, length).expect("r = 1 is squarefree");
        MollifierSpec { k_scale, a, length, y, x, h: h.identifier() }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Contract(format!("serializing mollifier: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: MollifierSpec = serde_json::from_str(text)
            .map_err(|e| Error::Parse { path: "<mollifier>".into(), message: e.to_string() })?;
        spec.validate()?;
        Ok(spec)
    }
}

/// `M(f) = sum_r x_r a_f(r^2) / sqrt r`.
pub fn mollifier_value(f: &HeckeEigenform, spec: &MollifierSpec) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for (&r, &xr) in &spec.x {
        if xr == 0.0 {
            continue;
        }
        let mut a = 1.0;
        for (p, e) in factorize(r) {
            a *= f.prime_power(p, 2 * e)?;
        }
        acc.add(xr * a / (r as f64).sqrt());
    }
    Ok(acc.value())
}

/// `sum_r |x_r| d(r^2) / sqrt r`, the Ramanujan-Petersson envelope of `M(f)`.
pub fn mollifier_envelope(spec: &MollifierSpec) -> f64 {
    spec.x
        .iter()
        .map(|(&r, &xr)| xr.abs() * crate::arith::num_divisors(r * r) as f64 / (r as f64).sqrt())
        .sum()
}

/// The four second-moment contributions as exact rationals in `a`:
/// `a(3+3a+a^2)/18`, `a^2(2+a)^2/8`, `a^3(6+7a+2a^2)/12`, `a^4(3+2a)^2/72`.
pub fn contributions_exact(a: &BigRational) -> [BigRational; 4] {
    let n = |v: i64| BigRational::from_integer(BigInt::from(v));
    let a2 = a * a;
    let a3 = &a2 * a;
    let a4 = &a3 * a;
    let r1 = a * (n(3) + n(3) * a + &a2) / n(18);
    let two_a = n(2) + a;
    let r2 = &a2 * &two_a * &two_a / n(8);
    let r3 = &a3 * (n(6) + n(7) * a + n(2) * &a2) / n(12);
    let three_a = n(3) + n(2) * a;
    let r4 = &a4 * &three_a * &three_a / n(72);
    [r1, r2, r3, r4]
}

/// `a(1+a)^3(3+3a+a^2)/18`.
pub fn m2_closed_form_exact(a: &BigRational) -> BigRational {
    let n = |v: i64| BigRational::from_integer(BigInt::from(v));
    let one_a = n(1) + a;
    a * &one_a * &one_a * &one_a * (n(3) + n(3) * a + a * a) / n(18)
}

/// `1 - (1 + a)^{-3}`.
pub fn proportion(a: f64) -> f64 {
    1.0 - (1.0 + a).powi(-3)
}

pub fn predictions(k_scale: f64, a: f64, h: &BumpWeight) -> Result<AsymptoticPrediction> {
    check_exponent(a)?;
    let exact_a = BigRational::from_f64(a).expect("finite a");
    let parts = contributions_exact(&exact_a);
    let sum = parts.iter().fold(BigRational::from_integer(0.into()), |s, p| s + p);
    if sum != m2_closed_form_exact(&exact_a) {
        return Err(Error::Contract(format!("second-moment contributions do not sum to the closed form at a = {a}")));
    }
    let h0 = h.integral();
    let lk = k_scale.ln();
    let m1_leading = h0 * k_scale * lk.powi(3) * a * (3.0 + 3.0 * a + a * a) / 6.0;
    let scale = h0 * k_scale * lk.powi(6);
    let m2_contributions = parts.map(|p| scale * p.to_f64().expect("finite"));
    let m2_leading = scale * sum.to_f64().expect("finite");
    Ok(AsymptoticPrediction { m1_leading, m2_contributions, m2_leading, proportion: proportion(a) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::exact::{mu_star_prime, rational, Surd};
    use crate::arith::primes_up_to;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_x(rng: &mut ChaCha8Rng, m: u64, density: f64) -> Coefficients {
        let mut x = Coefficients::new();
        for r in squarefree_upto(m) {
            if rng.gen::<f64>() < density {
                x.insert(r, rng.gen_range(-2.0..2.0));
            }
        }
        x
    }

    #[test]
    fn v_values() {
        assert_eq!(v_coeff(1).unwrap(), 1.0);
        assert!((v_coeff(2).unwrap() - 0.728_553_4).abs() < 1e-7);
        assert!(v_coeff(4).is_err());
        for j in squarefree_upto(200) {
            let (a, b) = (v_coeff(j).unwrap(), v_coeff_direct(j).unwrap());
            assert!((a - b).abs() <= 1e-13 * a.abs(), "j={j}: {a} vs {b}");
        }
    }

    #[test]
    fn easy_factor_exact() {
        for p in primes_up_to(100) {
            // mu_*(p)^2 / (p^2 v_p) with p^2 v_p = p (1 + 2/sqrt p - 2/p^{3/2} - 1/p^2)
            let mu = mu_star_prime(p);
            let pi = p as i64;
            let v = Surd::new(p, rational(pi * pi - 1, pi * pi), rational(2 * pi - 2, pi * pi));
            let lhs = &(&mu * &mu) / &(&v * &rational(pi, 1));
            assert_eq!(lhs, Surd::rational(p, rational(1, p as i64 - 1)), "p={p}");
        }
        for p in primes_up_to(10_000) {
            let q = p as f64;
            let lhs = mu_star(p).powi(2) / (q * q * v_coeff(p).unwrap());
            assert!((lhs * (q - 1.0) - 1.0).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn u_values() {
        let h = BumpWeight::default();
        let k = 100.0;
        let u1 = u_coeff(1, k, &h).unwrap();
        assert!((u1 - (k.ln() + afe_constant() + h.integrate(f64::ln) / h.integral())).abs() < 1e-14);
        // two terms: (n, r) = (1, 2) and (2, 1)
        let c = afe_constant();
        let i0 = h.integral();
        let brute = (h.integrate(|u| (u * k / 2.0).ln() + c) - tau_star(2) * h.integrate(|u| (u * k).ln() + c)) / (2.0 * i0);
        assert!((u_coeff(2, k, &h).unwrap() - brute).abs() < 1e-12);
        for j in squarefree_upto(100) {
            assert!(u_coeff(j, 1000.0, &h).unwrap() / mu_star(j) > 0.0, "j={j}");
        }
    }

    #[test]
    fn u_asymptotic_envelope() {
        let h = BumpWeight::default();
        let fit = |k: f64| {
            squarefree_upto(500)
                .map(|j| {
                    let env: f64 = factorize(j).iter().map(|&(p, _)| 1.0 + (p as f64).powf(-0.4)).product::<f64>() / j as f64;
                    (u_coeff(j, k, &h).unwrap() - u_coeff_asymptotic(j, k).unwrap()).abs() / env
                })
                .fold(0.0, f64::max)
        };
        let (c3, c6) = (fit(1e3), fit(1e6));
        assert!(c3 < 10.0 && (c6 - c3).abs() < 1e-6 * c3.max(1.0) + 1e-9, "{c3} {c6}");
    }

    #[test]
    fn transforms_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut x = Coefficients::new();
        x.insert(1, 1.0);
        let y = y_from_x(&x, 30).unwrap();
        assert_eq!(y[&1], 1.0);
        assert!(y.iter().all(|(&j, &v)| j == 1 || v == 0.0));
        for _ in 0..20 {
            let x = random_x(&mut rng, 30, 0.3);
            let back = x_from_y(&y_from_x(&x, 30).unwrap(), 30).unwrap();
            for (r, v) in back {
                assert!((v - x.get(&r).copied().unwrap_or(0.0)).abs() < 1e-13);
            }
        }
        let spec = optimal_y(2500.0, 0.499, &BumpWeight::default()).unwrap();
        assert_eq!(spec.length, 49);
        let y2 = y_from_x(&spec.x, spec.length).unwrap();
        for (j, v) in &spec.y {
            assert!((y2[j] - v).abs() < 1e-12 * v.abs().max(1.0));
        }
    }

    #[test]
    fn diagonalization() {
        let mut x = Coefficients::new();
        x.insert(1, 1.0);
        assert!((quad_form_brute(&x, 10).unwrap() - 1.0).abs() < 1e-15);
        for t in [1.0, -0.5] {
            x.insert(2, t);
            let y = y_from_x(&x, 2).unwrap();
            let diag = v_coeff(1).unwrap() * y[&1].powi(2) + v_coeff(2).unwrap() * y[&2].powi(2);
            assert!((quad_form_brute(&x, 2).unwrap() - diag).abs() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..100 {
            let m = [30, 40, 50][i % 3];
            let x = random_x(&mut rng, m, 0.5);
            let b = quad_form_brute(&x, m).unwrap();
            let d = quad_form_diag(&y_from_x(&x, m).unwrap()).unwrap();
            assert!((b - d).abs() <= 1e-10 * b.abs(), "{b} vs {d}");
        }
        assert!(quad_form_brute(&x, 101).is_err());
        let y = y_from_x(&random_x(&mut rng, 20, 0.5), 20).unwrap();
        let y2: Coefficients = y.iter().map(|(&j, &v)| (j, 2.0 * v)).collect();
        assert!((quad_form_diag(&y2).unwrap() - 4.0 * quad_form_diag(&y).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn optimum() {
        let h = BumpWeight::default();
        let spec = optimal_y(100.0, 0.4, &h).unwrap();
        assert_eq!(spec.y[&1], u_coeff(1, 100.0, &h).unwrap());
        assert!(spec.y.values().all(|v| v.is_finite() && v.abs() <= 3.0 * 100f64.ln()));
        let spec = optimal_y(1e4, 0.4, &h).unwrap();
        let bound: f64 = spec.y.iter().map(|(&j, &y)| y * y * v_coeff(j).unwrap()).sum();
        let ratio = |y: &Coefficients| linear_form(y, 1e4, &h).unwrap().powi(2) / quad_form_diag(y).unwrap();
        assert!((ratio(&spec.y) - bound).abs() < 1e-9 * bound);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let y: Coefficients = spec.y.iter().map(|(&j, &v)| (j, v * (1.0 + rng.gen_range(-0.5..0.5)) + rng.gen_range(-0.1..0.1))).collect();
            assert!(ratio(&y) <= bound + 1e-9);
        }
    }

    fn asymptotic_uv_sum(k: f64, m: u64) -> f64 {
        squarefree_upto(m).map(|j| u_coeff_asymptotic(j, k).unwrap().powi(2) / v_coeff(j).unwrap()).sum()
    }

    #[test]
    fn partial_summation_scale() {
        // sum_{j <= x} mu^2(j)/phi(j) = log x + c0 + o(1)
        let c0 = 0.577_215_664_901_532_9
            + primes_up_to(1_000_000).iter().map(|&p| (p as f64).ln() / (p as f64 * (p as f64 - 1.0))).sum::<f64>();
        assert!((c0 - 1.332_582_275_7).abs() < 1e-5, "{c0}");
        let k = 1e3;
        for a in [0.2, 0.3, 0.4] {
            let m = mollifier_length(k, a);
            let s = asymptotic_uv_sum(k, m);
            let lead = ((k * m as f64).ln().powi(3) - k.ln().powi(3)) / 3.0;
            let with_constant = lead + c0 * k.ln().powi(2);
            assert!((s / with_constant - 1.0).abs() < 0.15, "a={a}: {s} vs {with_constant}");
        }
        // the bare leading term is approached only slowly
        let dev = |k: f64| {
            let m = mollifier_length(k, 0.4);
            asymptotic_uv_sum(k, m) / (((k * m as f64).ln().powi(3) - k.ln().powi(3)) / 3.0) - 1.0
        };
        assert!(dev(1e10) < dev(1e3) && dev(1e10) > 0.0);
    }

    #[test]
    fn prediction_identities() {
        for i in 1..=20 {
            let a = rational(i, 42);
            let parts = contributions_exact(&a);
            let sum = parts.iter().fold(rational(0, 1), |s, p| s + p);
            assert_eq!(sum, m2_closed_form_exact(&a));
        }
        let a = rational(3, 10);
        let sum = contributions_exact(&a).iter().fold(rational(0, 1), |s, p| s + p);
        assert_eq!(sum, rational(3, 10) * rational(13, 10) * rational(13, 10) * rational(13, 10) * (rational(3, 1) + rational(9, 10) + rational(9, 100)) / rational(18, 1));
        assert!((proportion(0.5) - 19.0 / 27.0).abs() < 1e-15);
        assert!(proportion(1e-9) < 1e-8);
        let p = predictions(1000.0, 0.3, &BumpWeight::default()).unwrap();
        assert!((p.m2_contributions.iter().sum::<f64>() - p.m2_leading).abs() <= 1e-12 * p.m2_leading);
        assert!(predictions(1000.0, 0.5, &BumpWeight::default()).is_err());
        // M1^2 / M2 at leading order is (hat h(0) K / 2) times the proportion
        let h0 = BumpWeight::default().integral();
        let ratio = p.m1_leading.powi(2) / p.m2_leading / (h0 * 1000.0 / 2.0);
        assert!((ratio - p.proportion).abs() < 1e-12);
    }

    #[test]
    fn mollifier_values() {
        let forms = crate::hecke::eigenforms(84, 1000).unwrap();
        let h = BumpWeight::default();
        let triv = MollifierSpec::trivial(40.0, 0.3, &h);
        let spec = optimal_y(40.0, 0.3, &h).unwrap();
        let env = mollifier_envelope(&spec);
        for f in &forms {
            assert_eq!(mollifier_value(f, &triv).unwrap(), 1.0);
            let v = mollifier_value(f, &spec).unwrap();
            assert!(v.is_finite() && v.abs() <= env);
        }
        let text = spec.to_json().unwrap();
        assert_eq!(MollifierSpec::from_json(&text).unwrap(), spec);
    }
}
