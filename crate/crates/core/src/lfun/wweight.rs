use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use super::contour::ContourKernel;
use crate::specfun::{g_factor, zeta, BumpWeight};
use crate::{Error, Result};

const ABSCISSA: f64 = 0.75;

fn kernel_integrand(y: Complex64) -> Result<Complex64> {
    Ok(g_factor(y)? * zeta(1.0 + 2.0 * y)? / y)
}

/// `tilde V(eta) = (1/2 pi i) int_{(3/4)} G(y) zeta(1 + 2y) / y eta^{-y} dy`;
/// the weight-free single-variable piece of `W`.
#[derive(Debug, Clone)]
pub struct WKernel {
    kernel: ContourKernel,
}

impl WKernel {
    pub fn new(panel_width: f64) -> Result<Self> {
        Ok(WKernel { kernel: ContourKernel::build(ABSCISSA, panel_width, 1e-18, kernel_integrand)? })
    }

    pub fn global() -> Result<&'static WKernel> {
        static K: OnceLock<WKernel> = OnceLock::new();
        if let Some(k) = K.get() {
            return Ok(k);
        }
        let k = WKernel::new(0.25)?;
        Ok(K.get_or_init(|| k))
    }

    pub fn eval(&self, eta: f64) -> f64 {
        self.kernel.eval(eta)
    }

    /// `sqrt(2/pi) int h(w) e^{i w^2 v} tilde V(xi1 / w) tilde V(xi2 / w) dw`
    /// on a fixed number of panels.
    fn integrate(&self, xi1: f64, xi2: f64, v: f64, h: &BumpWeight, panels: usize) -> Complex64 {
        let pref = (2.0 / PI).sqrt();
        h.with_panels(panels)
            .weighted_nodes()
            .into_iter()
            .map(|(w, hw)| Complex64::from_polar(hw, w * w * v) * self.eval(xi1 / w) * self.eval(xi2 / w))
            .sum::<Complex64>()
            * pref
    }
}

/// `W(xi1, xi2, v)`: the double contour over `Re x = Re y = 3/4` of
/// `G(x) G(y) zeta(1+2x) zeta(1+2y) / (xy) xi1^{-x} xi2^{-y} hbar_{x+y}(v)`,
/// evaluated with the `w`-integral of `hbar` moved outside so the two
/// contours separate.
pub fn w_weight(xi1: f64, xi2: f64, v: f64, h: &BumpWeight) -> Result<Complex64> {
    if !(xi1 > 0.0 && xi2 > 0.0) {
        return Err(Error::invalid(format!("W needs positive xi, got ({xi1}, {xi2})")));
    }
    let kern = WKernel::global()?;
    let (lo, hi) = h.support();
    let cycles = v.abs() * (hi * hi - lo * lo) / TAU;
    let panels = h.panels().max((2.0 * cycles).ceil() as usize);
    let coarse = kern.integrate(xi1, xi2, v, h, panels);
    let fine = kern.integrate(xi1, xi2, v, h, 2 * panels);
    let change = (coarse - fine).norm();
    if change > 1e-6 * fine.norm().max(1e-300) && change > 1e-14 {
        return Err(Error::NonConvergence { what: "W weight", change });
    }
    Ok(fine)
}

/// The same double contour taken literally: trapezoidal rule with step
/// `step` on both lines, `|Im| <= t_max`, and `hbar_{x+y}(v)` evaluated
/// directly at every lattice point `x + y`.
pub fn w_weight_double_contour(
    xi1: f64,
    xi2: f64,
    v: f64,
    h: &BumpWeight,
    step: f64,
    t_max: f64,
) -> Result<Complex64> {
    let n = (t_max / step).ceil() as i64;
    let line = |xi: f64| -> Result<Vec<Complex64>> {
        (-n..=n)
            .map(|j| {
                let y = Complex64::new(ABSCISSA, j as f64 * step);
                Ok(kernel_integrand(y)? * (-y * xi.ln()).exp())
            })
            .collect()
    };
    let a = line(xi1)?;
    let b = line(xi2)?;
    let hb: Vec<Complex64> = (-2 * n..=2 * n)
        .map(|s| h.hbar(Complex64::new(2.0 * ABSCISSA, s as f64 * step), v))
        .collect();
    let len = a.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            acc += ai * bj * hb[i + j];
        }
    }
    debug_assert_eq!(hb.len(), 2 * len - 1);
    Ok(acc * (step / TAU).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_tilde_small_argument_is_logarithmic() {
        // residue at y = 0: (1/2)(log(1/eta) + c) + O(eta^{3/2})
        let k = WKernel::global().unwrap();
        let d = k.eval(1e-6) - k.eval(1e-5);
        assert!((d - 0.5 * 10f64.ln()).abs() < 1e-6, "{d}");
    }

    #[test]
    fn stable_and_decaying() {
        // tilde V(eta) ~ exp(-(11 eta)^2), so W is only visible for xi
        // below about 0.2
        let h = BumpWeight::default();
        let w = w_weight(0.1, 0.1, 1.0, &h).unwrap();
        assert!(w.norm().is_finite() && w.norm() > 1e-3);
        let base = w_weight(0.01, 0.01, 1.0, &h).unwrap().norm();
        assert!(w_weight(1.0, 0.01, 1.0, &h).unwrap().norm() <= 1e-2 * base);
        assert!(w_weight(0.01, 0.01, 50.0, &h).unwrap().norm() <= 1e-3 * base);
        assert!(w_weight(10.0, 10.0, 1.0, &h).unwrap().norm() < 1e-12);
    }

    #[test]
    fn matches_literal_double_contour() {
        let h = BumpWeight::default();
        for (x1, x2, v) in [(0.01, 0.01, 1.0), (0.1, 0.1, 1.0), (0.05, 0.2, -2.0), (0.01, 0.01, 10.0)] {
            let a = w_weight(x1, x2, v, &h).unwrap();
            let b = w_weight_double_contour(x1, x2, v, &h, 0.1, 40.0).unwrap();
            assert!((a - b).norm() <= 1e-6 * a.norm(), "({x1},{x2},{v}): {a} vs {b}");
        }
    }
}
