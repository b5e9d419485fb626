//! wasm-bindgen exports for the static page in `www/`. Every function returns
//! a flat `Float64Array` so the page can plot without a serializer.

use symsq_core::lfun::{bessel_average_check, v_asymptotic, VKernel};
use symsq_core::mollifier::proportion;
use symsq_core::specfun::BumpWeight;
use wasm_bindgen::prelude::*;

fn js_err(e: symsq_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Samples of V_k and its large-k approximation on a log grid in xi.
/// Layout: `[xi_0, v_0, approx_0, xi_1, ...]`. The approximation is NaN past
/// `xi = k^0.7`, where it no longer tracks V_k.
pub fn v_curve_points(k: u32, xi_min: f64, xi_max: f64, samples: usize) -> symsq_core::Result<Vec<f64>> {
    if !(xi_min > 0.0 && xi_max > xi_min) || samples < 2 {
        return Err(symsq_core::Error::InvalidArgument("need 0 < xi_min < xi_max and at least 2 samples".into()));
    }
    let kernel = VKernel::cached(k)?;
    let ratio = (xi_max / xi_min).ln();
    let cutoff = (k as f64).powf(0.7);
    let mut out = Vec::with_capacity(3 * samples);
    for i in 0..samples {
        let xi = xi_min * (ratio * i as f64 / (samples - 1) as f64).exp();
        let approx = if xi <= cutoff { v_asymptotic(k, xi) } else { f64::NAN };
        out.extend([xi, kernel.eval(xi), approx]);
    }
    Ok(out)
}

/// Bessel average against its main term for each t.
/// Layout: `[t_0, lhs_0, main_0, budget_0, t_1, ...]`.
pub fn bessel_points(k_scale: f64, ts: &[f64]) -> symsq_core::Result<Vec<f64>> {
    let h = BumpWeight::default();
    let mut out = Vec::with_capacity(4 * ts.len());
    for &t in ts {
        let b = bessel_average_check(k_scale, t, &h)?;
        out.extend([t, b.lhs, b.main_term, b.error_budget]);
    }
    Ok(out)
}

/// The limiting proportion on a uniform grid strictly inside 0 < a < 1/2.
/// Layout: `[a_0, p_0, a_1, p_1, ...]`.
pub fn proportion_points(samples: usize) -> Vec<f64> {
    (1..=samples)
        .flat_map(|i| {
            let a = 0.5 * i as f64 / (samples + 1) as f64;
            [a, proportion(a)]
        })
        .collect()
}

#[wasm_bindgen]
pub fn v_curve(k: u32, xi_min: f64, xi_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    v_curve_points(k, xi_min, xi_max, samples).map_err(js_err)
}

#[wasm_bindgen]
pub fn bessel_average(k_scale: f64, ts: Vec<f64>) -> Result<Vec<f64>, JsError> {
    bessel_points(k_scale, &ts).map_err(js_err)
}

#[wasm_bindgen]
pub fn proportion_curve(samples: usize) -> Vec<f64> {
    proportion_points(samples)
}

#[wasm_bindgen]
pub fn proportion_at(a: f64) -> f64 {
    proportion(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_curve_layout() {
        let pts = v_curve_points(24, 0.1, 50.0, 5).unwrap();
        assert_eq!(pts.len(), 15);
        assert!((pts[0] - 0.1).abs() < 1e-12 && (pts[12] - 50.0).abs() < 1e-9);
        assert!(pts[1] > pts[13]);
        assert!(pts[2].is_finite() && pts[14].is_nan());
        assert!(v_curve_points(24, 1.0, 0.5, 5).is_err());
    }

    #[test]
    fn proportion_monotone() {
        let pts = proportion_points(10);
        assert!(pts.chunks(2).zip(pts.chunks(2).skip(1)).all(|(p, q)| p[1] < q[1]));
        assert!(pts[19] < 19.0 / 27.0);
    }

    #[test]
    fn bessel_within_budget() {
        let pts = bessel_points(40.0, &[100.0, 1000.0]).unwrap();
        assert_eq!(pts.len(), 8);
        for c in pts.chunks(4) {
            assert!((c[1] - c[2]).abs() <= c[3].max(1e-6) * 10.0, "{c:?}");
        }
    }
}
