use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::ln_gamma_real;
use crate::{Error, Result};

const RESCALE_ABOVE: f64 = 1e250;

/// `J_n(x)` for integer order `n >= 0` and `x > 0`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("bessel_j needs finite x > 0, got {x}")));
    }
    let nf = n as f64;
    if x <= 2.0 * (nf + 1.0).sqrt() {
        ascending_series(n, x)
    } else if x >= 30f64.max(2.0 * nf * nf) {
        Ok(hankel(n, x))
    } else {
        Ok(miller(n, x, None)?[0])
    }
}

/// `J_0(x), ..., J_nmax(x)` from a single downward recurrence.
pub fn bessel_j_all(nmax: u32, x: f64) -> Result<Vec<f64>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid(format!("bessel_j_all needs finite x > 0, got {x}")));
    }
    miller(nmax, x, Some(()))
}

fn ascending_series(n: u32, x: f64) -> Result<f64> {
    let nf = n as f64;
    let half = 0.5 * x;
    let log_pref = nf * half.ln() - ln_gamma_real(nf + 1.0)?;
    if log_pref < -745.0 {
        return Ok(0.0);
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (nf + kf));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    Ok(log_pref.exp() * sum)
}

/// Hankel asymptotic expansion, used only when `x >= 2 n^2`.
fn hankel(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (n as f64) * FRAC_PI_2 - FRAC_PI_4;
    // reduce the phase with the exact n*pi/2 part kept separate from x
    let (s, c) = chi.sin_cos();
    (2.0 / (PI * x)).sqrt() * (p * c - q * s)
}

/// Downward recurrence normalized by `J_0 + 2 sum J_{2k} = 1`.
///
/// With `all = None` returns `[J_n]`; otherwise `J_0..=J_n`.
fn miller(n: u32, x: f64, all: Option<()>) -> Result<Vec<f64>> {
    let top = (n as f64).max(x);
    let start = (top + 15.0 + (40.0 * top).sqrt()).ceil() as usize;
    let start = if start % 2 == 1 { start + 1 } else { start };
    let n = n as usize;
    let mut keep: Vec<f64> = if all.is_some() { vec![0.0; n + 1] } else { vec![0.0] };
    let mut above = 0.0f64; // J_{k+1}
    let mut cur = 1e-300f64; // J_k, k = start
    let mut norm = 0.0f64;
    let two_over_x = 2.0 / x;
    let mut k = start;
    loop {
        if k % 2 == 0 && k > 0 {
            norm += 2.0 * cur;
        }
        if all.is_some() {
            if k <= n {
                keep[k] = cur;
            }
        } else if k == n {
            keep[0] = cur;
        }
        if k == 0 {
            norm += cur;
            break;
        }
        let below = (k as f64) * two_over_x * cur - above;
        above = cur;
        cur = below;
        k -= 1;
        if cur.abs() > RESCALE_ABOVE {
            let f = 1.0 / cur.abs();
            cur *= f;
            above *= f;
            norm *= f;
            for v in keep.iter_mut() {
                *v *= f;
            }
        }
    }
    if !norm.is_finite() || norm == 0.0 {
        return Err(Error::Overflow("bessel_j downward recurrence"));
    }
    for v in keep.iter_mut() {
        *v /= norm;
    }
    Ok(keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_values() {
        // reference values from an arbitrary-precision evaluation
        let cases = [
            (11, 0.1, 1.222_992_661_035_645_4e-22),
            (11, 1e4, -0.003_604_808_377_897_891_5),
            (0, 1e6, 0.000_331_043_013_739_873_76),
            (199, 150.0, 1.788_370_500_081_208_6e-13),
            (1999, 2500.0, 0.014_748_704_815_584_466),
            (1999, 1e6, -0.000_602_081_353_003_737_1),
            (5, 37.0, -0.120_257_423_113_959_87),
            (40, 30.0, 0.000_361_202_360_889_658_5),
            (100, 100.0, 0.096_366_673_295_861_56),
            (1, 1e-3, 0.000_499_999_937_500_002_6),
            (500, 800.0, 0.031_891_965_413_691_686),
        ];
        for (n, x, want) in cases {
            let got = bessel_j(n, x).unwrap();
            assert!((got - want).abs() <= 1e-12, "J_{n}({x}) = {got}, want {want}");
        }
        assert!(bessel_j(199, 1.0).unwrap().abs() < 1e-300);
    }

    #[test]
    fn small_argument_leading_term() {
        let approx = 0.05f64.powi(11) / 39_916_800.0;
        assert!((bessel_j(11, 0.1).unwrap() / approx - 1.0).abs() < 0.01);
    }

    #[test]
    fn large_argument_cosine() {
        let t = 1e4;
        let asym = (PI * t / 2.0).powf(-0.5) * (t - PI / 2.0 * 12.0 + PI / 4.0).cos();
        let j = bessel_j(11, t).unwrap();
        // the first neglected term is (4 nu^2 - 1) / (8t) ~ 6e-3 of the envelope
        let envelope = (PI * t / 2.0).powf(-0.5);
        assert!((j - asym).abs() <= 1e-2 * envelope);
    }

    #[test]
    fn bounded_and_recurrence() {
        for n in [1u32, 2, 11, 23, 59, 150] {
            for i in 1..60 {
                let t = 0.37 * (i * i) as f64;
                let j = bessel_j(n, t).unwrap();
                assert!(j.abs() <= 1.0);
                let lhs = bessel_j(n - 1, t).unwrap() + bessel_j(n + 1, t).unwrap();
                let rhs = 2.0 * n as f64 / t * j;
                assert!((lhs - rhs).abs() <= 1e-9, "n={n} t={t}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn all_orders_agree() {
        for x in [0.5, 7.0, 90.0, 1234.5] {
            let all = bessel_j_all(200, x).unwrap();
            for n in [0u32, 1, 17, 99, 200] {
                let one = bessel_j(n, x).unwrap();
                assert!((all[n as usize] - one).abs() <= 1e-12, "J_{n}({x})");
            }
        }
    }
}
