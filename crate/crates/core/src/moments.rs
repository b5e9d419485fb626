//! Desk-scale empirical moments over the family
//! `sum_{k even} h((k-1)/K) sum^h_{f in H_k}` and their main terms.

use serde::{Deserialize, Serialize};

use crate::arith::{divisors, factorize, squarefree_decompose};
use crate::hecke::{dimension, eigenforms_for_weights, HeckeEigenform};
use crate::lfun::{afe_constant, harmonic_weights, l_one_symsq, CentralValueKernel, CentralValueRecord};
use crate::mollifier::{mollifier_value, proportion, MollifierSpec};
use crate::specfun::BumpWeight;
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Default tolerance for central values.
pub const DEFAULT_CENTRAL_TOLERANCE: f64 = 1e-10;

/// `12 * 2K`: enough primes for central values of every weight up to `2K`
/// with room for twists.
pub fn default_prime_bound(k_scale: f64) -> u64 {
    (24.0 * k_scale).ceil().max(100.0) as u64
}

/// Even `k >= 2` with `h((k-1)/K) != 0`, ascending.
pub fn supported_weights(k_scale: f64, h: &BumpWeight) -> Vec<u32> {
    let (_, hi) = h.support();
    let top = (hi * k_scale + 1.0).ceil() as u32;
    (1..=top / 2)
        .map(|j| 2 * j)
        .filter(|&k| h.eval((k - 1) as f64 / k_scale) > 0.0)
        .collect()
}

/// Everything the moment sums need for one weight.
#[derive(Debug, Clone)]
pub struct WeightBlock {
    pub weight: u32,
    /// `h((k-1)/K)`.
    pub h_value: f64,
    pub forms: Vec<HeckeEigenform>,
    /// `(2 pi^2 / (k-1)) / L(1, sym^2 f)` per form.
    pub harmonic: Vec<f64>,
    pub central: Vec<CentralValueRecord>,
}

/// The weighted family at scale `K`.
#[derive(Debug, Clone)]
pub struct Family {
    pub k_scale: f64,
    pub h: BumpWeight,
    pub tolerance: f64,
    pub blocks: Vec<WeightBlock>,
}

fn block(k_scale: f64, h: &BumpWeight, tolerance: f64, weight: u32, mut forms: Vec<HeckeEigenform>) -> Result<WeightBlock> {
    for f in forms.iter_mut() {
        if f.l1_symsq.is_none() {
            f.l1_symsq = Some(l_one_symsq(f)?);
        }
    }
    let harmonic = if forms.is_empty() { Vec::new() } else { harmonic_weights(&forms)? };
    let central = if forms.is_empty() {
        Vec::new()
    } else {
        let kernel = CentralValueKernel::cached(weight, tolerance)?;
        forms.iter().map(|f| kernel.evaluate(f)).collect::<Result<Vec<_>>>()?
    };
    Ok(WeightBlock { weight, h_value: h.eval((weight - 1) as f64 / k_scale), forms, harmonic, central })
}

impl Family {
    /// Build from eigenforms supplied per weight (e.g. from a cache). Every
    /// supported weight with cusp forms must be present.
    pub fn from_forms(k_scale: f64, h: &BumpWeight, tolerance: f64, systems: Vec<(u32, Vec<HeckeEigenform>)>) -> Result<Self> {
        if !(k_scale >= 1.0) {
            return Err(Error::invalid(format!("K must be at least 1, got {k_scale}")));
        }
        let weights = supported_weights(k_scale, h);
        let mut by_weight: std::collections::BTreeMap<u32, Vec<HeckeEigenform>> = systems.into_iter().collect();
        let mut jobs = Vec::with_capacity(weights.len());
        for &k in &weights {
            let forms = by_weight.remove(&k).unwrap_or_default();
            if forms.len() != dimension(k) {
                return Err(Error::MissingForm(format!(
                    "weight {k} has {} forms, expected {}",
                    forms.len(),
                    dimension(k)
                )));
            }
            jobs.push((k, forms));
        }
        #[cfg(feature = "parallel")]
        let blocks = {
            use rayon::prelude::*;
            jobs.into_par_iter()
                .map(|(k, forms)| block(k_scale, h, tolerance, k, forms))
                .collect::<Result<Vec<_>>>()?
        };
        #[cfg(not(feature = "parallel"))]
        let blocks = jobs
            .into_iter()
            .map(|(k, forms)| block(k_scale, h, tolerance, k, forms))
            .collect::<Result<Vec<_>>>()?;
        Ok(Family { k_scale, h: h.clone(), tolerance, blocks })
    }

    /// Compute the eigenforms directly.
    pub fn compute(k_scale: f64, h: &BumpWeight, prime_bound: u64, tolerance: f64) -> Result<Self> {
        let weights: Vec<u32> = supported_weights(k_scale, h).into_iter().filter(|&k| dimension(k) > 0).collect();
        let systems = eigenforms_for_weights(&weights, prime_bound)?;
        Family::from_forms(k_scale, h, tolerance, systems.into_iter().map(|s| (s.weight, s.forms)).collect())
    }

    pub fn weights_used(&self) -> Vec<u32> {
        self.blocks.iter().map(|b| b.weight).collect()
    }

    pub fn forms_count(&self) -> usize {
        self.blocks.iter().map(|b| b.forms.len()).sum()
    }

    /// `sum_k h((k-1)/K) sum^h_f g(block, i)` in ascending `k`, then form
    /// index, with compensated accumulation.
    pub fn weighted_sum(&self, mut g: impl FnMut(&WeightBlock, usize) -> Result<f64>) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        for b in &self.blocks {
            for i in 0..b.forms.len() {
                acc.add(b.h_value * b.harmonic[i] * g(b, i)?);
            }
        }
        Ok(acc.value())
    }

    /// `sum^h 1` for each weight.
    pub fn harmonic_counts(&self) -> Vec<(u32, f64)> {
        self.blocks
            .iter()
            .map(|b| (b.weight, b.harmonic.iter().copied().collect::<CompensatedSum>().value()))
            .collect()
    }

    /// `sum_k h((k-1)/K) sum^h 1`.
    pub fn weighted_count(&self) -> f64 {
        self.weighted_sum(|_, _| Ok(1.0)).expect("constant summand")
    }
}

/// `a_f(r^2)`.
fn twist(f: &HeckeEigenform, r: u64) -> Result<f64> {
    factorize(r).iter().try_fold(1.0, |acc, &(p, e)| Ok(acc * f.prime_power(p, 2 * e)?))
}

fn check_twist(r: u64) -> Result<()> {
    if r == 0 {
        return Err(Error::invalid("twist r must be at least 1"));
    }
    Ok(())
}

/// `sum_k h((k-1)/K) sum^h L(1/2, sym^2 f) a_f(r^2)`.
pub fn first_moment_empirical(family: &Family, r: u64) -> Result<f64> {
    check_twist(r)?;
    if r as f64 > family.k_scale {
        return Err(Error::invalid(format!("first moment needs r <= K, got r = {r}")));
    }
    family.weighted_sum(|b, i| Ok(b.central[i].value * twist(&b.forms[i], r)?))
}

/// `(K / (2 sqrt r)) int h(u) (log(uK/r) + C) du`.
pub fn first_moment_main(k_scale: f64, r: u64, h: &BumpWeight) -> Result<f64> {
    check_twist(r)?;
    let c = afe_constant();
    let rf = r as f64;
    Ok(k_scale / (2.0 * rf.sqrt()) * h.integrate(|u| (u * k_scale / rf).ln() + c))
}

/// `sum_k h((k-1)/K) sum^h L(1/2, sym^2 f)^2 a_f(r^2)`.
pub fn second_moment_empirical(family: &Family, r: u64) -> Result<f64> {
    check_twist(r)?;
    if (r * r) as f64 > family.k_scale {
        return Err(Error::invalid(format!("second moment needs r <= sqrt K, got r = {r}")));
    }
    family.weighted_sum(|b, i| Ok(b.central[i].value.powi(2) * twist(&b.forms[i], r)?))
}

/// The explicit cubic part of the second-moment main term,
/// `(K / sqrt r) sum_{d | r^2} d1^{-1/2} int h(u) ((1/4) L^2 log(uK d2 / r) - L^3 / 12) du`
/// with `L = log(uK / (d1 d2))`. The lower-order polynomials are not
/// included.
pub fn second_moment_leading(k_scale: f64, r: u64, h: &BumpWeight) -> Result<f64> {
    check_twist(r)?;
    let rf = r as f64;
    let mut acc = CompensatedSum::new();
    for d in divisors(r * r) {
        let split = squarefree_decompose(d)?;
        let (d1, d2) = (split.d1 as f64, split.d2 as f64);
        acc.add(
            h.integrate(|u| {
                let l = (u * k_scale / (d1 * d2)).ln();
                0.25 * l * l * (u * k_scale * d2 / rf).ln() - l.powi(3) / 12.0
            }) / d1.sqrt(),
        );
    }
    Ok(k_scale / rf.sqrt() * acc.value())
}

/// Empirical mollified moments and the Cauchy-Schwarz ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifiedRatio {
    pub m1: f64,
    pub m2: f64,
    pub ratio: f64,
    /// `sum_k h((k-1)/K) sum^h 1`.
    pub family_count: f64,
    /// `(1 - (1+a)^{-3})` times the family count.
    pub predicted: f64,
}

pub fn mollified_ratio(family: &Family, spec: &MollifierSpec) -> Result<MollifiedRatio> {
    let mut values = Vec::with_capacity(family.blocks.len());
    for b in &family.blocks {
        values.push(b.forms.iter().map(|f| mollifier_value(f, spec)).collect::<Result<Vec<_>>>()?);
    }
    let index: std::collections::HashMap<u32, usize> =
        family.blocks.iter().enumerate().map(|(i, b)| (b.weight, i)).collect();
    let m1 = family.weighted_sum(|b, i| Ok(b.central[i].value * values[index[&b.weight]][i]))?;
    let m2 = family.weighted_sum(|b, i| Ok((b.central[i].value * values[index[&b.weight]][i]).powi(2)))?;
    if !(m2 > 0.0) {
        return Err(Error::Contract(format!("mollified second moment {m2} is not positive")));
    }
    let family_count = family.weighted_count();
    let ratio = m1 * m1 / m2;
    Ok(MollifiedRatio { m1, m2, ratio, family_count, predicted: proportion(spec.a) * family_count })
}

/// One cell of a moment experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub experiment: String,
    #[serde(rename = "K")]
    pub k_scale: f64,
    pub a: Option<f64>,
    pub r: u64,
    pub h: String,
    pub empirical: f64,
    pub main_term: f64,
    pub relative_deviation: f64,
    pub weights_used: Vec<u32>,
    pub forms_count: usize,
    pub runtime_seconds: f64,
}

impl MomentReport {
    pub fn new(experiment: &str, family: &Family, a: Option<f64>, r: u64, empirical: f64, main_term: f64) -> Self {
        MomentReport {
            experiment: experiment.to_string(),
            k_scale: family.k_scale,
            a,
            r,
            h: family.h.identifier(),
            empirical,
            main_term,
            relative_deviation: (empirical - main_term).abs() / main_term.abs(),
            weights_used: family.weights_used(),
            forms_count: family.forms_count(),
            runtime_seconds: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::make_bump;
    use crate::specfun::BumpFamily;

    #[test]
    fn weights_and_counts() {
        let h = BumpWeight::default();
        let w = supported_weights(40.0, &h);
        assert_eq!(w.first(), Some(&42));
        assert_eq!(w.last(), Some(&80));
        // Poisson summation: sum_k h((k-1)/K) = (K/2) hat h(0) + O(|hat h(K/2)|)
        let gap = |k: f64| {
            let s: f64 = supported_weights(k, &h).iter().map(|&w| h.eval((w - 1) as f64 / k)).sum();
            (s / (0.5 * k * h.integral()) - 1.0).abs()
        };
        assert!(gap(40.0) < 1e-3);
        assert!(gap(200.0) < 1e-6);
    }

    #[test]
    fn leading_terms() {
        let h = BumpWeight::default();
        let k = 60.0;
        let r1 = second_moment_leading(k, 1, &h).unwrap();
        let direct = k / 6.0 * h.integrate(|u| (u * k).ln().powi(3));
        assert!((r1 - direct).abs() < 1e-10 * direct);
        // r = 2: d in {1, 2, 4} -> (d1, d2) = (1, 1), (2, 1), (1, 2)
        let term = |d1: f64, d2: f64| {
            h.integrate(|u| {
                let l = (u * k / (d1 * d2)).ln();
                0.25 * l * l * (u * k * d2 / 2.0).ln() - l.powi(3) / 12.0
            }) / d1.sqrt()
        };
        let r2 = k / 2f64.sqrt() * (term(1.0, 1.0) + term(2.0, 1.0) + term(1.0, 2.0));
        assert!((second_moment_leading(k, 2, &h).unwrap() - r2).abs() < 1e-10 * r2.abs());
        let g = |k: f64| second_moment_leading(k, 1, &h).unwrap() / (k * k.ln().powi(3));
        assert!((g(1e4) / g(2e4) - 1.0).abs() < 0.1);
        // first moment main term
        let m1 = first_moment_main(k, 1, &h).unwrap();
        let unwound = k / 2.0 * h.integral() * (k.ln() + afe_constant() + h.integrate(f64::ln) / h.integral());
        assert!((m1 - unwound).abs() < 1e-10 * m1);
        let m4 = first_moment_main(k, 4, &h).unwrap();
        let expected = 0.5 * m1 - k / 4.0 * h.integral() * 4f64.ln();
        assert!((m4 - expected).abs() < 1e-10 * m1);
        for kk in [20.0, 40.0, 100.0] {
            for r in 1..=3 {
                assert!(first_moment_main(kk, r, &h).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn small_family() {
        let h = BumpWeight::default();
        let fam = Family::compute(24.0, &h, 600, 1e-10).unwrap();
        assert_eq!(fam.weights_used().first(), Some(&26));
        let m1 = first_moment_empirical(&fam, 1).unwrap();
        assert!(m1 > 0.0);
        let m2 = second_moment_empirical(&fam, 1).unwrap();
        assert!(m2 >= 0.0);
        // Cauchy-Schwarz on the finite weighted sum
        assert!(m1 * m1 <= m2 * fam.weighted_count() * (1.0 + 1e-12));
        // splitting the bump support splits the sum
        let lo = make_bump(BumpFamily::Standard, &[1.0, 1.5]).unwrap();
        let hi = make_bump(BumpFamily::Standard, &[1.5, 2.0]).unwrap();
        let fl = Family::compute(24.0, &lo, 600, 1e-10).unwrap();
        let fh = Family::compute(24.0, &hi, 600, 1e-10).unwrap();
        let m = |f: &Family| first_moment_empirical(f, 1).unwrap();
        let mut union = fl.clone();
        union.blocks.extend(fh.blocks.iter().cloned());
        assert!((m(&union) - m(&fl) - m(&fh)).abs() < 1e-12 * m(&union).abs());
        let trivial = MollifierSpec::trivial(24.0, 0.01, &h);
        let r = mollified_ratio(&fam, &trivial).unwrap();
        assert!((r.ratio - m1 * m1 / m2).abs() < 1e-12 * r.ratio);
        assert!(r.ratio <= r.family_count);
    }
}
