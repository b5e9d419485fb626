use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::vk::VKernel;
use crate::hecke::HeckeEigenform;
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Hard cap on the number of terms, in units of `k`.
const MAX_TERMS_PER_WEIGHT: usize = 12;
const TAIL_ABSCISSAS: [f64; 5] = [4.0, 8.0, 16.0, 24.0, 32.0];

/// `V_k(n)` tabulated up to the truncation point for one weight.
#[derive(Debug, Clone)]
pub struct CentralValueKernel {
    pub weight: u32,
    pub truncation: usize,
    /// Rigorous bound on `2 sum_{n > N} |a_f(n^2)| n^{-1/2} |V_k(n)|`
    /// given `|a_f(n^2)| <= d(n^2) <= n`.
    pub tail_bound: f64,
    v: Vec<f64>,
}

/// One computed central value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralValueRecord {
    pub weight: u32,
    pub index: usize,
    pub value: f64,
    pub truncation: usize,
    pub truncation_error: f64,
}

fn tail_bounds(k: u32) -> Result<Vec<(f64, f64)>> {
    TAIL_ABSCISSAS.iter().map(|&a| Ok((a, VKernel::envelope(k, a)?))).collect()
}

fn tail_at(bounds: &[(f64, f64)], n: usize) -> f64 {
    let n = n.max(1) as f64;
    bounds
        .iter()
        .map(|&(a, e)| 2.0 * e * n.powf(1.5 - a) / (a - 1.5))
        .fold(f64::INFINITY, f64::min)
}

impl CentralValueKernel {
    /// Smallest truncation whose tail bound is below `tolerance / 2`.
    pub fn new(k: u32, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0) {
            return Err(Error::invalid(format!("tolerance must be positive, got {tolerance}")));
        }
        let bounds = tail_bounds(k)?;
        let cap = MAX_TERMS_PER_WEIGHT * k as usize;
        let mut n = 1;
        while n < cap && tail_at(&bounds, n) > tolerance / 2.0 {
            n += 1;
        }
        Self::tabulate(k, n, tail_at(&bounds, n))
    }

    /// Fixed truncation `n_max`, whatever the tail.
    pub fn with_truncation(k: u32, n_max: usize) -> Result<Self> {
        let bounds = tail_bounds(k)?;
        Self::tabulate(k, n_max, tail_at(&bounds, n_max))
    }

    fn tabulate(k: u32, n: usize, tail_bound: f64) -> Result<Self> {
        let kernel = VKernel::cached(k)?;
        let mut v = vec![0.0; n + 1];
        for (i, slot) in v.iter_mut().enumerate().skip(1) {
            *slot = kernel.eval(i as f64);
        }
        Ok(CentralValueKernel { weight: k, truncation: n, tail_bound, v })
    }

    /// Shared kernel for `(k, tolerance)`.
    pub fn cached(k: u32, tolerance: f64) -> Result<Arc<Self>> {
        static STORE: OnceLock<Mutex<HashMap<(u32, u64), Arc<CentralValueKernel>>>> = OnceLock::new();
        let store = STORE.get_or_init(Default::default);
        let key = (k, tolerance.to_bits());
        if let Some(v) = store.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = Arc::new(CentralValueKernel::new(k, tolerance)?);
        store.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    pub fn v_values(&self) -> &[f64] {
        &self.v[1..]
    }

    /// `2 sum_{n <= N} a_f(n^2) n^{-1/2} V_k(n)`.
    pub fn evaluate(&self, f: &HeckeEigenform) -> Result<CentralValueRecord> {
        if f.weight != self.weight {
            return Err(Error::invalid(format!(
                "kernel for weight {} applied to a form of weight {}",
                self.weight, f.weight
            )));
        }
        let sq = f.square_coefficients(self.truncation as u64)?;
        let mut acc = CompensatedSum::new();
        for n in 1..=self.truncation {
            acc.add(sq[n] * self.v[n] / (n as f64).sqrt());
        }
        Ok(CentralValueRecord {
            weight: f.weight,
            index: f.index,
            value: 2.0 * acc.value(),
            truncation: self.truncation,
            truncation_error: self.tail_bound,
        })
    }
}

/// `L(1/2, sym^2 f)` to within `tolerance` (the truncation error is
/// recorded in the result).
pub fn central_value(f: &HeckeEigenform, tolerance: f64) -> Result<CentralValueRecord> {
    CentralValueKernel::cached(f.weight, tolerance)?.evaluate(f)
}

/// The same sum cut at a fixed `n_max`.
pub fn central_value_truncated(f: &HeckeEigenform, n_max: usize) -> Result<CentralValueRecord> {
    CentralValueKernel::with_truncation(f.weight, n_max)?.evaluate(f)
}
