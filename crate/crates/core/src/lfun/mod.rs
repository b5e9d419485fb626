//! Central values `L(1/2, sym^2 f)`, `L(1, sym^2 f)` and the harmonic-average
//! checks built on them.

mod central;
mod contour;
mod lone;
mod petersson;
mod vk;
mod wweight;

pub use central::{central_value, central_value_truncated, CentralValueKernel, CentralValueRecord};
pub use contour::ContourKernel;
pub use lone::{l_one_symsq, LOneKernel, DEFAULT_CUTOFF_SCALE};
pub use petersson::{
    bessel_average_check, harmonic_sum, harmonic_weights, petersson_check, petersson_grid,
    BesselAverage, PeterssonCheck, BESSEL_AVERAGE_SLACK,
};
pub use vk::{afe_constant, v_asymptotic, v_weight, VKernel, VRoute};
pub use wweight::{w_weight, w_weight_double_contour, WKernel};

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::specfun::ln_gamma;
use crate::Result;

/// Archimedean factor `L_inf(s) = pi^{-3s/2} Gamma((s+1)/2) Gamma((s+k-1)/2) Gamma((s+k)/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletedFactors {
    pub weight: u32,
}

impl CompletedFactors {
    pub fn new(weight: u32) -> Self {
        CompletedFactors { weight }
    }

    pub fn ln_l_inf(&self, s: Complex64) -> Result<Complex64> {
        let k = self.weight as f64;
        Ok(-1.5 * s * PI.ln()
            + ln_gamma((s + 1.0) * 0.5)?
            + ln_gamma((s + k - 1.0) * 0.5)?
            + ln_gamma((s + k) * 0.5)?)
    }

    /// The same factor after the duplication formula:
    /// `pi^{-3s/2 + 1/2} 2^{2 - s - k} Gamma((s+1)/2) Gamma(s+k-1)`.
    pub fn ln_l_inf_collapsed(&self, s: Complex64) -> Result<Complex64> {
        let k = self.weight as f64;
        Ok((-1.5 * s + 0.5) * PI.ln() + (2.0 - s - k) * 2f64.ln()
            + ln_gamma((s + 1.0) * 0.5)?
            + ln_gamma(s + k - 1.0)?)
    }

    /// `L_inf(s + y) / L_inf(s)`.
    pub fn ratio(&self, s: Complex64, y: Complex64) -> Result<Complex64> {
        Ok((self.ln_l_inf(s + y)? - self.ln_l_inf(s)?).exp())
    }
}
