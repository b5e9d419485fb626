use num_complex::Complex64;

use super::bernoulli;
use crate::{Error, Result};

const EM_TERMS: usize = 24;

/// Riemann zeta by Euler-Maclaurin summation.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole { function: "zeta", at: "1".into() });
    }
    if !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::invalid(format!("zeta argument {s} is not finite")));
    }
    let b = bernoulli();
    let n = (30.0 + s.norm()).ceil() as u64;
    let nf = n as f64;
    let mut head = Complex64::new(0.0, 0.0);
    for m in (1..n).rev() {
        head += (-s * (m as f64).ln()).exp();
    }
    let n_s = (-s * nf.ln()).exp();
    let mut total = head + n_s * nf / (s - 1.0) + n_s * 0.5;
    // sum_k B_2k / (2k)! * s (s+1) ... (s+2k-2) N^{-s-2k+1}
    let mut rising = s; // s (s+1) ... (s+2k-2)
    let mut fact = 2.0; // (2k)!
    let mut pow = n_s / nf;
    for k in 1..=EM_TERMS {
        let term = rising * pow * (b[2 * k] / fact);
        total += term;
        if term.norm() < 1e-18 * total.norm() {
            break;
        }
        let kk = 2 * k as u64;
        rising *= (s + (kk - 1) as f64) * (s + kk as f64);
        fact *= ((kk + 1) * (kk + 2)) as f64;
        pow /= nf * nf;
    }
    Ok(total)
}

pub fn zeta_real(x: f64) -> Result<f64> {
    Ok(zeta(Complex64::new(x, 0.0))?.re)
}

#[cfg(test)]
mod tests {
    use super::super::ln_gamma;
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Alternating (eta) series with Borwein's acceleration, valid for Re s > 0.
    fn zeta_eta(s: Complex64) -> Complex64 {
        let n = 60usize;
        let mut d = vec![0.0f64; n + 1];
        let mut acc = 0.0;
        let mut term = 1.0 / n as f64;
        for i in 0..=n {
            if i > 0 {
                term *= ((n + i - 1) as f64) * 4.0 * ((n - i + 1) as f64)
                    / ((2 * i - 1) as f64 * 2.0 * i as f64)
                    / 1.0;
            }
            acc += term;
            d[i] = acc * n as f64;
        }
        let mut sum = c(0.0, 0.0);
        for k in 0..n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += (-s * ((k + 1) as f64).ln()).exp() * (sign * (d[k] - d[n]));
        }
        let eta = -sum / d[n];
        eta / (1.0 - (c(1.0, 0.0) - s) .scale(2f64.ln()).exp())
    }

    #[test]
    fn classical_values() {
        assert!((zeta_real(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta_real(0.0).unwrap() + 0.5).abs() < 1e-14);
        assert!((zeta_real(-1.0).unwrap() + 1.0 / 12.0).abs() < 1e-14);
        assert!(zeta(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn frozen_values() {
        let cases = [
            (c(0.5, 3.0), c(0.532_736_670_974_232_9, -0.078_896_513_425_833_38)),
            (c(-1.5, 20.0), c(-4.856_977_220_470_568, -8.774_823_385_208_821)),
            (c(3.0, -90.0), c(1.125_524_411_927_601, -0.109_528_103_616_986_86)),
            (c(1.2, 100.0), c(1.460_444_492_145_270, -0.070_748_546_829_125_45)),
        ];
        for (s, want) in cases {
            let got = zeta(s).unwrap();
            assert!((got - want).norm() <= 1e-10 * want.norm(), "{s}: {got} vs {want}");
        }
    }

    #[test]
    fn eta_oracle() {
        for s in [c(0.5, 3.0), c(2.0, 7.0), c(0.8, -15.0), c(1.5, 0.3)] {
            let a = zeta(s).unwrap();
            let b = zeta_eta(s);
            assert!((a - b).norm() <= 1e-9 * a.norm(), "{s}: {a} vs {b}");
        }
    }

    #[test]
    fn functional_equation_grid() {
        for i in 0..6 {
            for j in 0..6 {
                let s = c(-1.5 + 0.7 * i as f64, -30.0 + 11.0 * j as f64);
                if (s - 1.0).norm() < 1e-3 {
                    continue;
                }
                let lhs = zeta(s).unwrap();
                let one_minus = c(1.0, 0.0) - s;
                let rhs = (s * 2f64.ln() + (s - 1.0) * PI.ln() + ln_gamma(one_minus).unwrap()).exp()
                    * (s * PI / 2.0).sin()
                    * zeta(one_minus).unwrap();
                assert!((lhs - rhs).norm() <= 1e-9 * lhs.norm().max(1e-3), "{s}: {lhs} vs {rhs}");
            }
        }
    }
}
