use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::contour::ContourKernel;
use super::CompletedFactors;
use crate::specfun::{digamma, euler_gamma, g_factor, ln_gamma, zeta};
use crate::{Error, Result};

const PANEL_WIDTH: f64 = 0.25;
const REL_TOL: f64 = 1e-18;

/// Which integrand represents `V_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VRoute {
    /// `G(y) Gamma(y + k - 1/2) / Gamma(k - 1/2) zeta(1 + 2y) / y` on `Re y = 1`;
    /// the exact factorization of the archimedean ratio.
    Factored,
    /// `L_inf(1/2 + y) / L_inf(1/2) zeta(1 + 2y) / y` on `Re y = 1/2`,
    /// straight from the definition.
    Completed,
    /// `G(y) k^y zeta(1 + 2y) / y` on `Re y = 1`: the large-`k`
    /// approximation, which differs from `V_k` by `O(1/k)`.
    LeadingPower,
}

/// Precomputed contour for `V_k(xi)`.
#[derive(Debug, Clone)]
pub struct VKernel {
    pub weight: u32,
    pub route: VRoute,
    kernel: ContourKernel,
}

fn integrand(k: u32, route: VRoute) -> Result<impl FnMut(Complex64) -> Result<Complex64>> {
    let kf = k as f64;
    let completed = CompletedFactors::new(k);
    let half = Complex64::new(0.5, 0.0);
    let lg_base = ln_gamma(Complex64::new(kf - 0.5, 0.0))?;
    Ok(move |y: Complex64| {
        let common = zeta(1.0 + 2.0 * y)? / y;
        let arch = match route {
            VRoute::Factored => {
                let lg = ln_gamma(y + kf - 0.5)? - lg_base;
                g_factor(y)? * lg.exp()
            }
            VRoute::Completed => completed.ratio(half, y)?,
            VRoute::LeadingPower => g_factor(y)? * (y * kf.ln()).exp(),
        };
        Ok(arch * common)
    })
}

impl VKernel {
    pub fn new(k: u32, route: VRoute) -> Result<Self> {
        VKernel::with_width(k, route, PANEL_WIDTH)
    }

    pub fn with_width(k: u32, route: VRoute, width: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::invalid(format!("weight {k} too small for V_k")));
        }
        let abscissa = match route {
            VRoute::Completed => 0.5,
            _ => 1.0,
        };
        let kernel = ContourKernel::build(abscissa, width, REL_TOL, integrand(k, route)?)?;
        Ok(VKernel { weight: k, route, kernel })
    }

    /// Shared kernel of the factored route for weight `k`.
    pub fn cached(k: u32) -> Result<Arc<VKernel>> {
        static STORE: OnceLock<Mutex<HashMap<u32, Arc<VKernel>>>> = OnceLock::new();
        let store = STORE.get_or_init(Default::default);
        if let Some(v) = store.lock().unwrap().get(&k) {
            return Ok(v.clone());
        }
        let v = Arc::new(VKernel::new(k, VRoute::Factored)?);
        store.lock().unwrap().insert(k, v.clone());
        Ok(v)
    }

    pub fn eval(&self, xi: f64) -> f64 {
        self.kernel.eval(xi)
    }

    pub fn nodes(&self) -> usize {
        self.kernel.len()
    }

    /// `E(A)` with `|V_k(xi)| <= E(A) xi^{-A}` for all `xi > 0`, from the
    /// factored integrand on the line `Re y = A`.
    pub fn envelope(k: u32, a: f64) -> Result<f64> {
        let kernel = ContourKernel::build(a, 0.5, 1e-12, integrand(k, VRoute::Factored)?)?;
        Ok(kernel.envelope())
    }
}

/// `V_k(xi)`, with the node-doubling check.
pub fn v_weight(k: u32, xi: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::invalid(format!("V_k needs xi > 0, got {xi}")));
    }
    if k < 12 {
        return Err(Error::invalid(format!("V_k needs k >= 12, got {k}")));
    }
    let coarse = VKernel::cached(k)?.eval(xi);
    let fine = VKernel::with_width(k, VRoute::Factored, PANEL_WIDTH / 2.0)?.eval(xi);
    let change = (coarse - fine).abs();
    if change > 1e-8 {
        return Err(Error::NonConvergence { what: "V_k contour", change });
    }
    Ok(fine)
}

/// `C = 2 gamma - (3/2) log pi - log 2 + psi(3/4) / 2`.
pub fn afe_constant() -> f64 {
    use std::f64::consts::PI;
    2.0 * euler_gamma() - 1.5 * PI.ln() - 2f64.ln() + 0.5 * digamma(0.75)
}

/// `(1/2)(log(k / xi) + C)`.
pub fn v_asymptotic(k: u32, xi: f64) -> f64 {
    0.5 * ((k as f64 / xi).ln() + afe_constant())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_value() {
        assert!((afe_constant() + 1.798_74).abs() < 1e-4, "{}", afe_constant());
    }

    #[test]
    fn examples() {
        let v = v_weight(100, 1.0).unwrap();
        assert!((v - v_asymptotic(100, 1.0)).abs() < 0.05, "{v}");
        assert!(v_weight(100, 1e4).unwrap().abs() < 1e-6);
        let a = VKernel::new(40, VRoute::Factored).unwrap().eval(7.0);
        let b = VKernel::new(40, VRoute::Completed).unwrap().eval(7.0);
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn routes_agree_on_grid() {
        for (k, xi) in [(12, 0.5), (12, 3.0), (16, 10.0), (24, 1.0), (40, 7.0), (60, 30.0), (100, 2.0), (100, 80.0), (160, 5.0), (200, 150.0)] {
            let a = VKernel::new(k, VRoute::Factored).unwrap().eval(xi);
            let b = VKernel::new(k, VRoute::Completed).unwrap().eval(xi);
            assert!((a - b).abs() < 1e-10, "k={k} xi={xi}: {a} vs {b}");
        }
    }

    #[test]
    fn leading_power_is_close_but_distinct() {
        let a = VKernel::new(40, VRoute::Factored).unwrap().eval(7.0);
        let c = VKernel::new(40, VRoute::LeadingPower).unwrap().eval(7.0);
        let d = (a - c).abs();
        assert!(d < 0.05 && d > 1e-6, "{d}");
    }

    #[test]
    fn envelope_bounds_values() {
        let kern = VKernel::new(60, VRoute::Factored).unwrap();
        for a in [2.0, 8.0] {
            let e = VKernel::envelope(60, a).unwrap();
            for xi in [1.0, 10.0, 60.0, 300.0] {
                assert!(kern.eval(xi).abs() <= e * xi.powf(-a) * (1.0 + 1e-9) + 1e-15);
            }
        }
    }
}
