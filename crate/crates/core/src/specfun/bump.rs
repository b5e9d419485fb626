use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use super::ln_gamma;
use crate::quad::{GaussLegendre, Panels};
use crate::{Error, Result};

const ORDER: usize = 16;
const BASE_PANELS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BumpFamily {
    /// `exp(1 / (((u - c) / w)^2 - 1))` on `(c - w, c + w)`; the default
    /// member has support `(1, 2)`.
    Standard,
}

impl std::str::FromStr for BumpFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" | "bump" => Ok(BumpFamily::Standard),
            other => Err(Error::invalid(format!("unknown bump family '{other}'"))),
        }
    }
}

/// Smooth weight `h`, compactly supported in `(0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpWeight {
    family: BumpFamily,
    lo: f64,
    hi: f64,
    panels: usize,
}

/// Build a bump. `params` is empty for the default support `(1, 2)` or
/// `[lo, hi]` for a translated and scaled copy.
pub fn make_bump(family: BumpFamily, params: &[f64]) -> Result<BumpWeight> {
    let (lo, hi) = match params {
        [] => (1.0, 2.0),
        [lo, hi] => (*lo, *hi),
        _ => {
            return Err(Error::invalid(format!(
                "bump parameters must be empty or [lo, hi], got {} values",
                params.len()
            )))
        }
    };
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("bump support must be bounded"));
    }
    if lo <= 0.0 {
        return Err(Error::invalid(format!("bump support must stay away from 0, got lo = {lo}")));
    }
    if hi <= lo {
        return Err(Error::invalid(format!("empty bump support ({lo}, {hi})")));
    }
    Ok(BumpWeight { family, lo, hi, panels: BASE_PANELS })
}

impl Default for BumpWeight {
    fn default() -> Self {
        make_bump(BumpFamily::Standard, &[]).expect("default bump is valid")
    }
}

impl BumpWeight {
    pub fn family(&self) -> BumpFamily {
        self.family
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Stable short name used in cache keys and report file names.
    pub fn identifier(&self) -> String {
        format!("bump_{}_{}", fmt_short(self.lo), fmt_short(self.hi))
    }

    /// Same weight with a different number of quadrature panels.
    pub fn with_panels(&self, panels: usize) -> Self {
        BumpWeight { panels: panels.max(1), ..self.clone() }
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u <= self.lo || u >= self.hi {
            return 0.0;
        }
        let c = 0.5 * (self.lo + self.hi);
        let w = 0.5 * (self.hi - self.lo);
        let x = (u - c) / w;
        (1.0 / (x * x - 1.0)).exp()
    }

    fn grid(&self, extra: usize) -> Panels {
        Panels::new(self.lo, self.hi, self.panels.max(extra), ORDER)
    }

    /// `int h(u) f(u) du` with the weight's own panel rule.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.grid(0).integrate(|u| self.eval(u) * f(u))
    }

    pub fn integrate_complex(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.integrate_complex_with(0, f)
    }

    fn integrate_complex_with(&self, min_panels: usize, f: impl Fn(f64) -> Complex64) -> Complex64 {
        self.grid(min_panels).integrate_complex(|u| f(u) * self.eval(u))
    }

    /// `hat h(0) = int h`.
    pub fn integral(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    /// Nodes and `h`-weighted quadrature weights over the support.
    pub fn weighted_nodes(&self) -> Vec<(f64, f64)> {
        self.grid(0)
            .points()
            .into_iter()
            .map(|(u, w)| (u, w * self.eval(u)))
            .filter(|&(_, w)| w != 0.0)
            .collect()
    }

    fn oscillation_panels(&self, cycles: f64) -> usize {
        // about two panels per cycle keeps 16-point rules well resolved
        (2.0 * cycles).ceil() as usize
    }

    /// `hat h(xi) = int h(u) e^{-2 pi i u xi} du`.
    pub fn fourier(&self, xi: f64) -> Complex64 {
        let cycles = xi.abs() * (self.hi - self.lo);
        self.integrate_complex_with(self.oscillation_panels(cycles), |u| {
            Complex64::from_polar(1.0, -TAU * u * xi)
        })
    }

    /// `int |v|^4 |hat h(v)| dv` over the real line.
    ///
    /// `v^4` amplifies the rounding floor of the quadrature for `hat h`, so
    /// the integral stops once the pieces are negligible or start rising
    /// again off that floor.
    pub fn fourier_fourth_moment(&self) -> f64 {
        // |hat h| is even; integrate v in [0, V]
        let width = 0.5;
        let mut total = 0.0;
        let mut a = 0.0;
        let mut quiet = 0;
        let mut floor = f64::INFINITY;
        while quiet < 20 {
            let piece = Panels::new(a, a + width, 1, ORDER)
                .integrate(|v| v.powi(4) * self.fourier(v).norm());
            total += piece;
            a += width;
            if piece < 1e-6 * total {
                if piece > 2.0 * floor {
                    break;
                }
                floor = floor.min(piece);
            }
            quiet = if piece < 1e-10 * total { quiet + 1 } else { 0 };
        }
        2.0 * total
    }

    /// `hbar_z(v) = int_0^inf h(sqrt u) / sqrt(2 pi u) u^{z/2} e^{iuv} du`,
    /// evaluated after the substitution `u = w^2`.
    pub fn hbar(&self, z: Complex64, v: f64) -> Complex64 {
        let cycles = (v.abs() * (self.hi * self.hi - self.lo * self.lo)
            + z.im.abs() * (self.hi / self.lo).ln())
            / TAU;
        let pref = (2.0 / PI).sqrt();
        self.integrate_complex_with(self.oscillation_panels(cycles), |w| {
            let lw = w.ln();
            (z * lw + Complex64::new(0.0, w * w * v)).exp() * pref
        })
    }

    /// Mellin transform `tilde hbar_z(s)` for `0 < Re s < 1`.
    pub fn hbar_mellin(&self, z: Complex64, s: Complex64) -> Result<Complex64> {
        if !(s.re > 0.0 && s.re < 1.0) {
            return Err(Error::invalid(format!("hbar_mellin needs 0 < Re s < 1, got {s}")));
        }
        Ok(gamma_phase(s)? * self.hbar_power_moment(z - 2.0 * s))
    }

    /// `sqrt(2/pi) int h(w) w^e dw`.
    fn hbar_power_moment(&self, e: Complex64) -> Complex64 {
        let cycles = e.im.abs() * (self.hi / self.lo).ln() / TAU;
        let pref = (2.0 / PI).sqrt();
        self.integrate_complex_with(self.oscillation_panels(cycles), |w| (e * w.ln()).exp() * pref)
    }
}

/// `Gamma(s) e^{i pi s / 2}`.
pub(crate) fn gamma_phase(s: Complex64) -> Result<Complex64> {
    Ok((ln_gamma(s)? + Complex64::new(0.0, 0.5 * PI) * s).exp())
}

fn fmt_short(x: f64) -> String {
    let s = format!("{x}");
    s.replace('.', "p").replace('-', "m")
}

/// Precomputed contour `Re s = c` for inverting `tilde hbar_z`.
#[derive(Debug, Clone)]
pub struct MellinInversion {
    c: f64,
    nodes: Vec<(f64, Complex64)>,
    pub t_min: f64,
    pub t_max: f64,
}

impl MellinInversion {
    /// Truncation: on `Im s > 0` the gamma factor decays like `e^{-pi t}`;
    /// on `Im s < 0` only the smoothness of `h` helps, so the lower limit is
    /// extended until the integrand has fallen below `1e-13` of its peak.
    pub fn new(h: &BumpWeight, z: Complex64, c: f64, panel_width: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::invalid(format!("contour abscissa {c} outside (0, 1)")));
        }
        let t_max = 40.0;
        let mut nodes = Vec::new();
        let gl = GaussLegendre::cached(ORDER);
        let push_panel = |a: f64, b: f64, nodes: &mut Vec<(f64, Complex64)>| -> Result<f64> {
            let mut peak = 0.0f64;
            for (t, w) in gl.mapped(a, b) {
                let val = h.hbar_mellin(z, Complex64::new(c, t))?;
                peak = peak.max(val.norm());
                nodes.push((t, val * w));
            }
            Ok(peak)
        };
        let mut global_peak = 0.0f64;
        let mut a = 0.0;
        while a < t_max {
            global_peak = global_peak.max(push_panel(a, a + panel_width, &mut nodes)?);
            a += panel_width;
        }
        let mut b = 0.0;
        let mut quiet = 0;
        while quiet < 20 {
            let peak = push_panel(b - panel_width, b, &mut nodes)?;
            global_peak = global_peak.max(peak);
            quiet = if peak < 1e-13 * global_peak { quiet + 1 } else { 0 };
            b -= panel_width;
            if b < -5000.0 {
                return Err(Error::NonConvergence { what: "hbar Mellin inversion", change: peak });
            }
        }
        Ok(MellinInversion { c, nodes, t_min: b, t_max })
    }

    /// `(1 / 2 pi i) int_{(c)} v^{-s} tilde hbar_z(s) ds`.
    pub fn eval(&self, v: f64) -> Complex64 {
        let lv = v.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for &(t, wv) in &self.nodes {
            acc += (-Complex64::new(self.c, t) * lv).exp() * wv;
        }
        acc / TAU
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        let h = BumpWeight::default();
        assert!((h.eval(1.5) - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(h.eval(1.0), 0.0);
        assert_eq!(h.eval(2.0), 0.0);
        assert_eq!(h.identifier(), "bump_1_2");
        assert!(make_bump(BumpFamily::Standard, &[0.0, 1.0]).is_err());
        assert!(make_bump(BumpFamily::Standard, &[1.0, f64::INFINITY]).is_err());
        assert!(make_bump(BumpFamily::Standard, &[2.0, 1.0]).is_err());
        let g = make_bump(BumpFamily::Standard, &[0.5, 1.25]).unwrap();
        assert!((g.eval(0.875) - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(g.identifier(), "bump_0p5_1p25");
    }

    #[test]
    fn integral_stable_under_doubling() {
        let h = BumpWeight::default();
        let a = h.integral();
        let b = h.with_panels(2 * h.panels()).integral();
        assert!((a - b).abs() < 1e-10);
        assert!((a - 0.221_996_908_084_039_7).abs() < 1e-10, "{a}");
    }

    #[test]
    fn fourier_symmetry_and_decay() {
        let h = BumpWeight::default();
        let h0 = h.fourier(0.0);
        assert!(h0.re > 0.0 && h0.im.abs() < 1e-16);
        for xi in [0.3, 4.0, 17.5] {
            assert!((h.fourier(-xi) - h.fourier(xi).conj()).norm() < 1e-14);
        }
        // faster than any polynomial: xi^4 |hat h(xi)| keeps shrinking
        let env = |x: f64| x.powi(4) * h.fourier(x).norm();
        assert!(env(20.0) > env(40.0) && env(40.0) > env(80.0));
        assert!(h.fourier(40.0).norm() < 1e-5 * h0.norm());
    }

    #[test]
    fn hbar_basic() {
        let h = BumpWeight::default();
        let z0 = Complex64::new(0.0, 0.0);
        let at0 = h.hbar(z0, 0.0);
        assert!(at0.re > 0.0 && at0.im == 0.0);
        let direct = crate::quad::Panels::new(1.0, 4.0, 64, 16)
            .integrate(|u| h.eval(u.sqrt()) / (TAU * u).sqrt());
        assert!((at0.re - direct).abs() < 1e-12);
        let (a, b) = (h.hbar(z0, 5.0).norm(), h.hbar(z0, 10.0).norm());
        assert!(b < a);
        assert!(a < 25f64.recip() && b < 100f64.recip());
    }

    #[test]
    fn mellin_factor_and_domain() {
        let g = gamma_phase(Complex64::new(0.5, 0.0)).unwrap();
        let want = Complex64::from_polar(PI.sqrt(), PI / 4.0);
        assert!((g - want).norm() < 1e-14);
        let h = BumpWeight::default();
        assert!(h.hbar_mellin(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)).is_err());
        let s = Complex64::new(0.5, 40.0);
        let m = h.hbar_mellin(Complex64::new(0.0, 0.0), s).unwrap();
        assert!(m.norm() <= 1.0 / s.norm_sqr());
    }

    #[test]
    fn mellin_inversion_reproduces_hbar() {
        let h = BumpWeight::default();
        let z0 = Complex64::new(0.0, 0.0);
        let inv = MellinInversion::new(&h, z0, 0.5, 0.5).unwrap();
        for v in [1.0, 2.0, 5.0] {
            let a = inv.eval(v);
            let b = h.hbar(z0, v);
            assert!((a - b).norm() < 1e-6, "v={v}: {a} vs {b}");
        }
    }
}
