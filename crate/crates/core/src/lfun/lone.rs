use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::contour::ContourKernel;
use super::CompletedFactors;
use crate::hecke::{symsq_dirichlet_coeffs, HeckeEigenform};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// `delta` in the Mellin cutoff `H(w) = exp((w / delta)^2)`.
pub const DEFAULT_CUTOFF_SCALE: f64 = 8.0;

const PANEL_WIDTH: f64 = 0.25;
/// Terms are dropped once both weights stay below this for `QUIET_RUN`
/// consecutive `m`.
const TERM_FLOOR: f64 = 1e-16;
const QUIET_RUN: usize = 32;

/// Weights of the two-sided expansion
/// `L(1) = sum c_m m^{-1} Phi_1(m / Y) + sum c_m Phi_2(m Y)`, `Y = X / k`, with
/// `Phi_1(x) = (1/2 pi i) int_{(1)} L_inf(1 + w) / L_inf(1) H(w) x^{-w} dw / w` and
/// `Phi_2(x) = (1/2 pi i) int_{(3/2)} L_inf(w) / L_inf(1) H(w) x^{-w} dw / w`.
#[derive(Debug, Clone)]
pub struct LOneKernel {
    pub weight: u32,
    pub cutoff: f64,
    pub scale: f64,
    weights: Vec<f64>,
}

impl LOneKernel {
    pub fn new(k: u32, cutoff: f64) -> Result<Self> {
        LOneKernel::with_scale(k, cutoff, DEFAULT_CUTOFF_SCALE)
    }

    pub fn with_scale(k: u32, cutoff: f64, scale: f64) -> Result<Self> {
        if !(cutoff > 0.0 && scale > 0.0) {
            return Err(Error::invalid(format!("L(1) cutoff {cutoff} and scale {scale} must be positive")));
        }
        let lf = CompletedFactors::new(k);
        let one = Complex64::new(1.0, 0.0);
        let base = lf.ln_l_inf(one)?;
        let h = move |w: Complex64| (w * w / (scale * scale)).exp() / w;
        let phi1 = ContourKernel::build(1.0, PANEL_WIDTH, 1e-18, |w| Ok(lf.ratio(one, w)? * h(w)))?;
        let phi2 = ContourKernel::build(1.5, PANEL_WIDTH, 1e-18, |w| {
            Ok((lf.ln_l_inf(w)? - base).exp() * h(w))
        })?;
        let y = cutoff / k as f64;
        let mut weights = vec![0.0];
        let mut quiet = 0;
        let mut m = 1usize;
        while quiet < QUIET_RUN {
            let mf = m as f64;
            let a = phi1.eval(mf / y) / mf;
            let b = phi2.eval(mf * y);
            weights.push(a + b);
            quiet = if a.abs() < TERM_FLOOR && b.abs() < TERM_FLOOR { quiet + 1 } else { 0 };
            m += 1;
            if m > 1_000_000 {
                return Err(Error::NonConvergence { what: "L(1) expansion length", change: a.abs() + b.abs() });
            }
        }
        weights.truncate(weights.len() - QUIET_RUN);
        Ok(LOneKernel { weight: k, cutoff, scale, weights })
    }

    /// Shared kernel with the default cutoff `X = k`.
    pub fn cached(k: u32) -> Result<Arc<Self>> {
        static STORE: OnceLock<Mutex<HashMap<u32, Arc<LOneKernel>>>> = OnceLock::new();
        let store = STORE.get_or_init(Default::default);
        if let Some(v) = store.lock().unwrap().get(&k) {
            return Ok(v.clone());
        }
        let v = Arc::new(LOneKernel::new(k, k as f64)?);
        store.lock().unwrap().insert(k, v.clone());
        Ok(v)
    }

    /// Number of Dirichlet coefficients used.
    pub fn length(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn evaluate(&self, f: &HeckeEigenform) -> Result<f64> {
        let c = symsq_dirichlet_coeffs(f, self.length() as u64)?;
        let mut acc = CompensatedSum::new();
        for m in 1..self.weights.len() {
            acc.add(c[m] * self.weights[m]);
        }
        let value = acc.value();
        if !(value > 0.0) {
            return Err(Error::Contract(format!(
                "L(1, sym^2 f) = {value} for weight {} form {}; expected a positive value",
                f.weight, f.index
            )));
        }
        Ok(value)
    }
}

/// `L(1, sym^2 f)` with the default cutoff.
pub fn l_one_symsq(f: &HeckeEigenform) -> Result<f64> {
    LOneKernel::cached(f.weight)?.evaluate(f)
}
