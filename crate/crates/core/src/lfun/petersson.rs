use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use super::lone::l_one_symsq;
use crate::arith::KloostermanTable;
use crate::hecke::HeckeEigenform;
use crate::specfun::{bessel_j, bessel_j_all, ln_gamma_real, BumpWeight};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Multiplier on the Bessel-average error budget.
pub const BESSEL_AVERAGE_SLACK: f64 = 10.0;

/// Terms of the Kloosterman side below this are dropped, together with
/// everything beyond them, once the remaining tail bound is smaller too.
const KLOOSTERMAN_FLOOR: f64 = 1e-18;

/// `(2 pi^2 / (k - 1)) / L(1, sym^2 f)` for each form, in order.
pub fn harmonic_weights(forms: &[HeckeEigenform]) -> Result<Vec<f64>> {
    forms
        .iter()
        .map(|f| {
            let l1 = match f.l1_symsq {
                Some(v) => v,
                None => l_one_symsq(f)?,
            };
            Ok(2.0 * PI * PI / (f.weight as f64 - 1.0) / l1)
        })
        .collect()
}

/// `sum^h alpha_f` over the forms; `values` is keyed by form index and
/// must cover every form.
pub fn harmonic_sum(forms: &[HeckeEigenform], values: &BTreeMap<usize, f64>) -> Result<f64> {
    let w = harmonic_weights(forms)?;
    let mut acc = CompensatedSum::new();
    for (f, wf) in forms.iter().zip(&w) {
        let a = values
            .get(&f.index)
            .ok_or_else(|| Error::MissingForm(format!("weight {} index {}", f.weight, f.index)))?;
        acc.add(wf * a);
    }
    Ok(acc.value())
}

/// Both sides of the trace formula for one `(n, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeterssonCheck {
    pub weight: u32,
    pub n: u64,
    pub m: u64,
    pub c_max: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
    /// Bound on the omitted `c > c_max` terms from `|J_nu(x)| <= (x/2)^nu / nu!`.
    pub tail_bound: f64,
}

/// `2 pi sum_{c > c0} (2 pi sqrt(nm) / c)^{k-1} / Gamma(k)`, bounding the
/// Kloosterman side past `c0` (using `|S(n,m;c)| <= c`).
fn kloosterman_tail(k: u32, nm: f64, c0: f64) -> f64 {
    let kf = k as f64;
    let ln = (kf - 1.0) * (TAU * nm.sqrt()).ln() - ln_gamma_real(kf).expect("k >= 12") + (2.0 - kf) * c0.ln() - (kf - 2.0).ln();
    TAU * ln.exp()
}

fn weight_of(forms: &[HeckeEigenform]) -> Result<u32> {
    let k = forms.first().ok_or_else(|| Error::invalid("no forms supplied"))?.weight;
    if forms.iter().any(|f| f.weight != k) {
        return Err(Error::invalid("forms of mixed weight"));
    }
    if k < 12 || k % 2 == 1 {
        return Err(Error::invalid(format!("weight {k} must be even and at least 12")));
    }
    Ok(k)
}

/// Trace formula on the grid `1 <= n <= m <= n_max`; one Kloosterman table
/// per modulus serves every pair.
pub fn petersson_grid(forms: &[HeckeEigenform], n_max: u64, c_max: u64) -> Result<Vec<PeterssonCheck>> {
    let k = weight_of(forms)?;
    let w = harmonic_weights(forms)?;
    let coeffs: Vec<Vec<f64>> = forms
        .iter()
        .map(|f| (1..=n_max).map(|n| f.coefficient(n)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let pairs: Vec<(u64, u64)> = (1..=n_max).flat_map(|n| (n..=n_max).map(move |m| (n, m))).collect();
    let mut sums: Vec<CompensatedSum> = vec![CompensatedSum::new(); pairs.len()];
    let mut active: Vec<bool> = vec![true; pairs.len()];
    for c in 1..=c_max {
        if !active.iter().any(|&a| a) {
            break;
        }
        let table = KloostermanTable::new(c);
        for (i, &(n, m)) in pairs.iter().enumerate() {
            if !active[i] {
                continue;
            }
            let nm = (n * m) as f64;
            let x = 4.0 * PI * nm.sqrt() / c as f64;
            let j = bessel_j(k - 1, x)?;
            let s = table.sum(n as i64, m as i64).value;
            sums[i].add(TAU * sign * s / c as f64 * j);
            if x < k as f64 && kloosterman_tail(k, nm, c as f64) < KLOOSTERMAN_FLOOR {
                active[i] = false;
            }
        }
    }
    Ok(pairs
        .iter()
        .enumerate()
        .map(|(i, &(n, m))| {
            let lhs = compensated(w.iter().zip(&coeffs).map(|(wf, a)| wf * a[n as usize - 1] * a[m as usize - 1]));
            let rhs = if n == m { 1.0 } else { 0.0 } + sums[i].value();
            let nm = (n * m) as f64;
            let tail_bound = if active[i] { kloosterman_tail(k, nm, c_max as f64) } else { KLOOSTERMAN_FLOOR };
            PeterssonCheck { weight: k, n, m, c_max, lhs, rhs, defect: (lhs - rhs).abs(), tail_bound }
        })
        .collect())
}

fn compensated(xs: impl Iterator<Item = f64>) -> f64 {
    xs.collect::<CompensatedSum>().value()
}

/// Trace formula for one `(n, m)`.
pub fn petersson_check(forms: &[HeckeEigenform], n: u64, m: u64, c_max: u64) -> Result<PeterssonCheck> {
    if n == 0 || m == 0 {
        return Err(Error::invalid("Petersson check needs n, m >= 1"));
    }
    let k = weight_of(forms)?;
    let mut values = BTreeMap::new();
    for f in forms {
        values.insert(f.index, f.coefficient(n)? * f.coefficient(m)?);
    }
    let lhs = harmonic_sum(forms, &values)?;
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let nm = (n * m) as f64;
    let mut acc = CompensatedSum::new();
    let mut done = false;
    for c in 1..=c_max {
        let x = 4.0 * PI * nm.sqrt() / c as f64;
        let s = KloostermanTable::new(c).sum(n as i64, m as i64).value;
        acc.add(TAU * sign * s / c as f64 * bessel_j(k - 1, x)?);
        if x < k as f64 && kloosterman_tail(k, nm, c as f64) < KLOOSTERMAN_FLOOR {
            done = true;
            break;
        }
    }
    let rhs = if n == m { 1.0 } else { 0.0 } + acc.value();
    let tail_bound = if done { KLOOSTERMAN_FLOOR } else { kloosterman_tail(k, nm, c_max as f64) };
    Ok(PeterssonCheck { weight: k, n, m, c_max, lhs, rhs, defect: (lhs - rhs).abs(), tail_bound })
}

/// Direct Bessel sum against its stationary-phase main term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselAverage {
    pub k_scale: f64,
    pub t: f64,
    pub lhs: f64,
    pub main_term: f64,
    pub error_budget: f64,
    pub slack: f64,
    pub within_budget: bool,
}

/// `sum_{k even} 2 i^k h((k-1)/K) J_{k-1}(t)` against
/// `-(K / sqrt t) Im(e^{-i pi/4} e^{it} hbar(K^2 / 2t))`.
pub fn bessel_average_check(k_scale: f64, t: f64, h: &BumpWeight) -> Result<BesselAverage> {
    if !(t > 0.0) {
        return Err(Error::invalid(format!("Bessel average needs t > 0, got {t}")));
    }
    if !(k_scale >= 20.0) {
        return Err(Error::invalid(format!("Bessel average needs K >= 20, got {k_scale}")));
    }
    let (lo, hi) = h.support();
    let nu_max = (hi * k_scale).ceil() as u32 + 1;
    let j = bessel_j_all(nu_max, t)?;
    let mut acc = CompensatedSum::new();
    let mut k = 2u32;
    while k - 1 <= nu_max {
        let u = (k - 1) as f64 / k_scale;
        if u > lo && u < hi {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            acc.add(2.0 * sign * h.eval(u) * j[(k - 1) as usize]);
        }
        k += 2;
    }
    let hb = h.hbar(Complex64::new(0.0, 0.0), k_scale * k_scale / (2.0 * t));
    let phase = Complex64::from_polar(1.0, t - PI / 4.0);
    let main_term = -(k_scale / t.sqrt()) * (phase * hb).im;
    let error_budget = t / k_scale.powi(4) * h.fourier_fourth_moment();
    let lhs = acc.value();
    Ok(BesselAverage {
        k_scale,
        t,
        lhs,
        main_term,
        error_budget,
        slack: BESSEL_AVERAGE_SLACK,
        within_budget: (lhs - main_term).abs() <= BESSEL_AVERAGE_SLACK * error_budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hecke::eigenforms;

    #[test]
    fn harmonic_sum_basics() {
        let forms = eigenforms(24, 1000).unwrap();
        let zero: BTreeMap<usize, f64> = forms.iter().map(|f| (f.index, 0.0)).collect();
        assert_eq!(harmonic_sum(&forms, &zero).unwrap(), 0.0);
        let a: BTreeMap<usize, f64> = forms.iter().map(|f| (f.index, 1.0 + f.index as f64)).collect();
        let b: BTreeMap<usize, f64> = forms.iter().map(|f| (f.index, 3.0 - f.index as f64)).collect();
        let ab: BTreeMap<usize, f64> = forms.iter().map(|f| (f.index, 2.0 * a[&f.index] - b[&f.index])).collect();
        let lin = 2.0 * harmonic_sum(&forms, &a).unwrap() - harmonic_sum(&forms, &b).unwrap();
        assert!((harmonic_sum(&forms, &ab).unwrap() - lin).abs() < 1e-13);
        let mut partial = zero.clone();
        partial.remove(&1);
        assert!(matches!(harmonic_sum(&forms, &partial), Err(Error::MissingForm(_))));
    }

    #[test]
    fn harmonic_count_at_small_weight() {
        // the count is 1 + O(2^{-k}) only asymptotically; at k = 12 the
        // c = 1 Kloosterman term is still of size one
        let forms = eigenforms(12, 1000).unwrap();
        let ones: BTreeMap<usize, f64> = forms.iter().map(|f| (f.index, 1.0)).collect();
        let s = harmonic_sum(&forms, &ones).unwrap();
        let check = petersson_check(&forms, 1, 1, 1000).unwrap();
        assert!((s - check.rhs).abs() < 1e-6, "{s} vs {}", check.rhs);
        assert!((s - 2.8403).abs() < 1e-3, "{s}");
    }

    #[test]
    fn trace_formula_examples() {
        let f12 = eigenforms(12, 1000).unwrap();
        assert!(petersson_check(&f12, 1, 1, 1000).unwrap().defect <= 1e-6);
        let f16 = eigenforms(16, 1000).unwrap();
        assert!(petersson_check(&f16, 2, 3, 1000).unwrap().defect <= 1e-6);
        let f40 = eigenforms(40, 1000).unwrap();
        let c = petersson_check(&f40, 1, 1, 1000).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-6 && c.defect <= 1e-8, "{c:?}");
        // J_39(8 pi) is already 3.5e-5
        let c = petersson_check(&f40, 2, 2, 1000).unwrap();
        assert!(c.defect <= 1e-8, "{c:?}");
    }

    #[test]
    fn grid_matches_single_checks() {
        let forms = eigenforms(18, 1000).unwrap();
        let grid = petersson_grid(&forms, 6, 300).unwrap();
        assert_eq!(grid.len(), 21);
        for g in &grid {
            let single = petersson_check(&forms, g.n, g.m, 300).unwrap();
            assert!((g.rhs - single.rhs).abs() < 1e-13 && g.defect <= 1e-6, "{g:?}");
        }
    }

    #[test]
    fn bessel_average_examples() {
        let h = BumpWeight::default();
        let small = bessel_average_check(100.0, 1.0, &h).unwrap();
        assert!(small.lhs.abs() <= 1e-8, "{small:?}");
        let big = bessel_average_check(100.0, 1e4, &h).unwrap();
        assert!(big.within_budget, "{big:?}");
        let doubled = bessel_average_check(100.0, 2e4, &h).unwrap();
        assert!((doubled.error_budget / big.error_budget - 2.0).abs() < 1e-12);
    }
}
