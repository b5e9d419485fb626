//! Special functions on the complex plane and the bump weight `h`.

mod bessel;
mod bump;
mod gamma;
mod zeta;

pub use bessel::{bessel_j, bessel_j_all};
pub use bump::{make_bump, BumpFamily, BumpWeight, MellinInversion};
pub use gamma::{digamma, euler_gamma, g_factor, gamma_ratio, ln_gamma, ln_gamma_real};
pub use zeta::{zeta, zeta_real};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::sync::OnceLock;

/// The two sides of the reflection identity
/// `(8 pi)^s zeta(2s) Gamma(s) G(s) sin(pi s/2 - pi/4) = -zeta(1-2s) G(-s) / sqrt 2`,
/// returned as `(left, right)`.
pub fn g_reflection_sides(s: Complex64) -> crate::Result<(Complex64, Complex64)> {
    use std::f64::consts::{FRAC_1_SQRT_2, PI};
    let left = (s * (8.0 * PI).ln() + ln_gamma(s)?).exp()
        * zeta(2.0 * s)?
        * g_factor(s)?
        * (s * (PI / 2.0) - PI / 4.0).sin();
    let right = -zeta(1.0 - 2.0 * s)? * g_factor(-s)? * FRAC_1_SQRT_2;
    Ok((left, right))
}

/// Bernoulli numbers `B_0 .. B_60` (with `B_1 = -1/2`) as doubles.
pub(crate) fn bernoulli() -> &'static [f64] {
    static B: OnceLock<Vec<f64>> = OnceLock::new();
    B.get_or_init(|| {
        // Akiyama-Tanigawa in exact rationals
        let n = 61;
        let mut a: Vec<BigRational> = Vec::with_capacity(n);
        let mut out = Vec::with_capacity(n);
        for m in 0..n {
            a.push(BigRational::new(1.into(), (m as i64 + 1).into()));
            for j in (1..=m).rev() {
                let jr = BigRational::from_integer((j as i64).into());
                a[j - 1] = jr * (&a[j - 1] - &a[j]);
            }
            out.push(a[0].to_f64().unwrap());
        }
        // Akiyama-Tanigawa yields B_1 = +1/2
        out[1] = -0.5;
        out
    })
}
