use num_complex::Complex64;
use std::f64::consts::PI;

use super::bernoulli;
use crate::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const STIRLING_RADIUS: f64 = 15.0;
const STIRLING_TERMS: usize = 12;

pub fn euler_gamma() -> f64 {
    0.577_215_664_901_532_9
}

fn stirling(z: Complex64) -> Complex64 {
    let b = bernoulli();
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut term = inv;
    let mut corr = Complex64::new(0.0, 0.0);
    for k in 1..=STIRLING_TERMS {
        let c = b[2 * k] / ((2 * k) as f64 * (2 * k - 1) as f64);
        corr += term * c;
        term *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + corr
}

/// Principal branch of `log Gamma(z)`: the continuation of the real
/// function from the positive axis to the plane slit along `(-inf, 0]`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::invalid(format!("ln_gamma argument {z} is not finite")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole { function: "ln_gamma", at: format!("{}", z.re) });
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.norm() < STIRLING_RADIUS || w.re < 1.0 {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

pub fn ln_gamma_real(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::invalid(format!("ln_gamma_real needs x > 0, got {x}")));
    }
    Ok(ln_gamma(Complex64::new(x, 0.0))?.re)
}

/// `Gamma(z + a) / Gamma(z)` through log-gamma differences.
pub fn gamma_ratio(z: Complex64, a: Complex64) -> Result<Complex64> {
    Ok((ln_gamma(z + a)? - ln_gamma(z)?).exp())
}

/// `psi(x)` for real `x > 0`.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0, "digamma needs x > 0, got {x}");
    let b = bernoulli();
    let mut x = x;
    let mut acc = 0.0;
    while x < STIRLING_RADIUS {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut pow = inv2;
    let mut series = 0.0;
    for k in 1..=STIRLING_TERMS {
        series += b[2 * k] / (2 * k) as f64 * pow;
        pow *= inv2;
    }
    acc + x.ln() - 0.5 / x - series
}

/// `G(y) = pi^{-3y/2} 2^{-y} Gamma(y/2 + 3/4) / Gamma(3/4)`.
pub fn g_factor(y: Complex64) -> Result<Complex64> {
    let lg = ln_gamma(y * 0.5 + 0.75)? - ln_gamma(Complex64::new(0.75, 0.0))?;
    Ok((lg - y * (1.5 * PI.ln() + 2f64.ln())).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_values() {
        assert!(ln_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(ln_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-15);
        let half = ln_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14);
        // reflection oracle at 3/4
        let s = ln_gamma(c(0.75, 0.0)).unwrap().re + ln_gamma(c(0.25, 0.0)).unwrap().re;
        assert!((s - (PI / (PI / 4.0).sin()).ln()).abs() < 1e-14);
        assert!((ln_gamma_real(171.0).unwrap() - 706.573_062_245_787_3).abs() < 1e-11);
        assert!(ln_gamma(c(0.0, 0.0)).is_err());
        assert!(ln_gamma(c(-3.0, 0.0)).is_err());
        assert!(ln_gamma(c(-3.0, 1e-9)).is_ok());
    }

    #[test]
    fn principal_branch() {
        // frozen values from an independent arbitrary-precision evaluation
        let cases = [
            (c(0.5, 30.0), c(-46.204_951_270_642_23, 72.037_310_428_805_79)),
            (c(-2.5, 1.0), c(-2.344_190_652_465_592_6, -8.304_127_986_657_926)),
            (c(100.0, -50.0), c(347.053_049_933_172_5, -231.969_701_846_462_2)),
        ];
        for (z, want) in cases {
            let got = ln_gamma(z).unwrap();
            assert!((got - want).norm() <= 1e-12 * want.norm(), "{z}: {got} vs {want}");
        }
    }

    #[test]
    fn recurrence_and_duplication() {
        for i in 0..20 {
            let z = c(0.15 + 0.37 * i as f64, -4.0 + 0.45 * i as f64);
            let lhs = ln_gamma(z + 1.0).unwrap() - ln_gamma(z).unwrap() - z.ln();
            let w = (lhs * Complex64::i() / (2.0 * PI)).re; // multiple of 2 pi i allowed
            assert!((lhs - Complex64::new(0.0, 2.0 * PI) * (-w).round()).norm() < 1e-11);
            // Gamma(2z) = 2^{2z-1} pi^{-1/2} Gamma(z) Gamma(z + 1/2), compared as values
            let a = ln_gamma(2.0 * z).unwrap().exp();
            let b = ((2.0 * z - 1.0) * 2f64.ln() - 0.5 * PI.ln() + ln_gamma(z).unwrap()
                + ln_gamma(z + 0.5).unwrap())
            .exp();
            assert!((a - b).norm() <= 1e-10 * a.norm(), "z={z}");
        }
    }

    #[test]
    fn digamma_values() {
        assert!((digamma(1.0) + euler_gamma()).abs() < 1e-14);
        let gauss = -euler_gamma() - 3.0 * 2f64.ln() + PI / 2.0;
        assert!((digamma(0.75) - gauss).abs() < 1e-13);
        assert!((digamma(1.3) - digamma(0.3) - 1.0 / 0.3).abs() < 1e-13);
    }

    #[test]
    fn g_factor_values() {
        assert!((g_factor(c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        for i in 0..=10 {
            let g = g_factor(c(0.1 * i as f64, 30.0)).unwrap();
            assert!(g.norm() < (-20f64).exp());
        }
    }
}
